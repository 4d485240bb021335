#include "nmv/audit.hpp"

#include <omp.h>

#include <cmath>
#include <limits>

#include "nmv/wasserstein.hpp"

namespace nmv {

const char* audit_condition_name(AuditCondition c) {
    switch (c) {
        case AuditCondition::contraction: return "A1-contraction";
        case AuditCondition::drift_one_sided: return "A2-drift";
        case AuditCondition::diffusion_lipschitz: return "A2-diffusion";
        case AuditCondition::growth: return "A3-growth";
        case AuditCondition::consequence: return "consequence-1.2";
    }
    return "?";
}

namespace {

struct TrialInputs {
    PathGrid xi_p, eta_p;
    std::vector<PathGrid> mu_p, nu_p;
};

// Roles: 0 xi, 1 eta, 2..9 mu atoms, 10..17 nu atoms.
TrialInputs make_trial(const SegmentSampler& sampler, long t) {
    const auto ut = static_cast<uint32_t>(t);
    TrialInputs in{sampler.sample_path(ut, 0), sampler.sample_path(ut, 1), {}, {}};
    const long n = sampler.law_size(ut);
    in.mu_p.reserve(static_cast<size_t>(n));
    in.nu_p.reserve(static_cast<size_t>(n));
    for (long j = 0; j < n; ++j) {
        in.mu_p.push_back(sampler.sample_path(ut, static_cast<uint32_t>(2 + j)));
        in.nu_p.push_back(sampler.sample_path(ut, static_cast<uint32_t>(10 + j)));
    }
    return in;
}

EmpiricalLaw law_of(const std::vector<PathGrid>& paths) {
    std::vector<Segment> atoms;
    atoms.reserve(paths.size());
    for (const PathGrid& p : paths) atoms.push_back(segment_at(p, 0.0));
    return EmpiricalLaw(std::move(atoms));
}

std::vector<double> flat_segment_values(const Segment& s) {
    std::vector<double> v;
    for (long k = -s.delay_steps(); k <= 0; ++k)
        for (int c = 0; c < s.dim(); ++c) v.push_back(s.at_offset(k)[c]);
    return v;
}

// Both sides of every audited inequality at one sampled input tuple.
void trial_sides(const ModelSpec& spec, const SegmentSampler& sampler, long t,
                 const PathGrid& zero_path, double* lhs, double* rhs) {
    const TrialInputs in = make_trial(sampler, t);
    const Segment xi = segment_at(in.xi_p, 0.0);
    const Segment eta = segment_at(in.eta_p, 0.0);
    const Segment zero = segment_at(zero_path, 0.0);
    const EmpiricalLaw mu = law_of(in.mu_p);
    const EmpiricalLaw nu = law_of(in.nu_p);

    const double seg_gap = sup_norm_diff(xi, eta);
    const double w2 = wasserstein2(mu, nu);
    const double pair_rhs = seg_gap * seg_gap + w2 * w2;

    const Vec Dxi = spec.D(xi);
    const Vec Deta = spec.D(eta);
    lhs[0] = (Dxi - Deta).norm();
    rhs[0] = spec.alpha * seg_gap;

    const Vec head_gap = xi.head() - eta.head() - (Dxi - Deta);
    const Vec b_xi_mu = spec.b(xi, mu);
    const Vec b_eta_nu = spec.b(eta, nu);
    lhs[1] = 2.0 * head_gap.dot(b_xi_mu - b_eta_nu);
    rhs[1] = spec.L * pair_rhs;

    const Mat s_xi_mu = spec.sigma(xi, mu);
    const Mat s_eta_nu = spec.sigma(eta, nu);
    lhs[2] = (s_xi_mu - s_eta_nu).squaredNorm();
    rhs[2] = spec.L * pair_rhs;

    const double mu_m2 = mu.second_moment();
    const Vec b0 = spec.b(zero, mu);
    const Mat s0 = spec.sigma(zero, mu);
    lhs[3] = std::max(b0.squaredNorm(), s0.squaredNorm());
    rhs[3] = spec.L1 * (1.0 + mu_m2);

    const double xi_norm = sup_norm(xi);
    lhs[4] = std::max(2.0 * (xi.head() - Dxi).dot(b_xi_mu), s_xi_mu.squaredNorm());
    rhs[4] = spec.L2() * (1.0 + xi_norm * xi_norm + mu_m2);
}

}  // namespace

AuditReport audit_assumptions(const ModelSpec& spec, const SegmentSampler& sampler, long trials,
                              int threads) {
    if (trials < 1) throw config_error("audit_assumptions: trials must be >= 1");
    if (sampler.dim() != spec.dim_d)
        throw config_error("audit_assumptions: sampler dimension does not match the model");
    const int nt = threads > 0 ? threads : omp_get_max_threads();

    const PathGrid zero_path(sampler.grid(), spec.dim_d);
    std::vector<double> margins(static_cast<size_t>(trials) * kAuditConditionCount);

#pragma omp parallel for schedule(static) num_threads(nt)
    for (long t = 0; t < trials; ++t) {
        double lhs[kAuditConditionCount], rhs[kAuditConditionCount];
        trial_sides(spec, sampler, t, zero_path, lhs, rhs);
        for (int c = 0; c < kAuditConditionCount; ++c)
            margins[static_cast<size_t>(t) * kAuditConditionCount + c] = rhs[c] - lhs[c];
    }

    AuditReport rep;
    rep.trials = trials;
    std::array<long, kAuditConditionCount> worst_trial{};
    for (int c = 0; c < kAuditConditionCount; ++c) {
        rep.worst_margin[static_cast<size_t>(c)] = std::numeric_limits<double>::infinity();
        worst_trial[static_cast<size_t>(c)] = -1;
    }
    for (long t = 0; t < trials; ++t)
        for (int c = 0; c < kAuditConditionCount; ++c) {
            const double m = margins[static_cast<size_t>(t) * kAuditConditionCount + c];
            if (m < rep.worst_margin[static_cast<size_t>(c)]) {
                rep.worst_margin[static_cast<size_t>(c)] = m;
                worst_trial[static_cast<size_t>(c)] = t;
            }
        }

    // D(0) = 0 is part of (A1); fold it into that condition's margin.
    {
        const double d0 = spec.D(segment_at(zero_path, 0.0)).norm();
        if (-d0 < rep.worst_margin[0]) {
            rep.worst_margin[0] = -d0;
            worst_trial[0] = -1;
        }
    }

    constexpr double kTol = 1e-12;
    for (int c = 0; c < kAuditConditionCount; ++c) {
        const bool ok = rep.worst_margin[static_cast<size_t>(c)] >= -kTol;
        rep.passed[static_cast<size_t>(c)] = ok;
        if (!ok) {
            AuditWitness w;
            w.condition = static_cast<AuditCondition>(c);
            w.trial = worst_trial[static_cast<size_t>(c)];
            if (w.trial >= 0) {
                double lhs[kAuditConditionCount], rhs[kAuditConditionCount];
                trial_sides(spec, sampler, w.trial, zero_path, lhs, rhs);
                w.lhs = lhs[c];
                w.rhs = rhs[c];
                const TrialInputs in = make_trial(sampler, w.trial);
                w.xi_values = flat_segment_values(segment_at(in.xi_p, 0.0));
                w.eta_values = flat_segment_values(segment_at(in.eta_p, 0.0));
            }
            rep.witnesses.push_back(std::move(w));
        }
    }
    return rep;
}

}  // namespace nmv
