#include "nmv/stochastic.hpp"

#include <omp.h>

#include <cmath>

#include "nmv/mc_stats.hpp"

namespace nmv {

namespace {

void check_xi(const ModelSpec& spec, const Segment& xi, const TimeGrid& grid) {
    if (xi.dim() != spec.dim_d) throw config_error("simulate: xi dimension mismatch");
    if (xi.delay_steps() != grid.delay_steps() || xi.step() != grid.step())
        throw config_error("simulate: xi geometry does not match the grid");
}

void copy_initial(const Segment& xi, PathGrid& out) {
    const long d = out.grid().delay_steps();
    for (long i = 0; i <= d; ++i) out.set_node(i, xi.at_offset(i - d));
}

void fill_brownian_increment(Vec& dw, const NoiseStream& w, double h, long cell, int m) {
    for (int c = 0; c < m; ++c)
        dw[c] = w.increment(h, static_cast<uint32_t>(cell), static_cast<uint32_t>(c));
}

// One Euler-Maruyama step shared by all particles of a cloud.
void particle_step(const ModelSpec& spec, const EmpiricalLaw& law, PathGrid& path, long k,
                   double root_eps, double h, const NoiseStream& w, const SolverOptions& opts) {
    const long cell = k - path.grid().delay_steps();
    const Segment seg = segment_at_node(path, k);
    Vec dw(spec.dim_m);
    fill_brownian_increment(dw, w, h, cell, spec.dim_m);
    const Vec z = path.node(k) - spec.D(seg) + h * spec.b(seg, law) +
                  root_eps * (spec.sigma(seg, law) * dw);
    neutral_step_solve(spec, z, path, k + 1, opts);
}

ParticleCloud simulate_particles_impl(const ModelSpec& spec, const Segment& xi, double eps, long N,
                                      const TimeGrid& grid, const NoiseBundle& noise,
                                      uint32_t replica, const SolverOptions& opts, int threads,
                                      bool parallel) {
    check_xi(spec, xi, grid);
    if (N < 1) throw config_error("simulate_particles: N must be >= 1");
    if (eps < 0.0 || eps > 1.0) throw config_error("simulate_particles: eps must be in [0,1]");
    ParticleCloud cloud;
    cloud.eps = eps;
    cloud.paths.reserve(static_cast<size_t>(N));
    for (long i = 0; i < N; ++i) {
        cloud.paths.emplace_back(grid, spec.dim_d);
        copy_initial(xi, cloud.paths.back());
    }
    const double h = grid.step();
    const double root_eps = std::sqrt(eps);
    const long d = grid.delay_steps();
    const int nt = threads > 0 ? threads : omp_get_max_threads();
    for (long k = d; k < d + grid.horizon_steps(); ++k) {
        const EmpiricalLaw law = cloud.law_at_node(k);  // step-start law, built in index order
        if (parallel) {
#pragma omp parallel for schedule(static) num_threads(nt)
            for (long i = 0; i < N; ++i)
                particle_step(spec, law, cloud.paths[static_cast<size_t>(i)], k, root_eps, h,
                              noise.stream(replica, static_cast<uint32_t>(i)), opts);
        } else {
            for (long i = 0; i < N; ++i)
                particle_step(spec, law, cloud.paths[static_cast<size_t>(i)], k, root_eps, h,
                              noise.stream(replica, static_cast<uint32_t>(i)), opts);
        }
    }
    return cloud;
}

}  // namespace

ParticleCloud simulate_particles(const ModelSpec& spec, const Segment& xi, double eps, long N,
                                 const TimeGrid& grid, const NoiseBundle& noise, uint32_t replica,
                                 const SolverOptions& opts, int threads) {
    return simulate_particles_impl(spec, xi, eps, N, grid, noise, replica, opts, threads, true);
}

ParticleCloud simulate_particles_serial(const ModelSpec& spec, const Segment& xi, double eps,
                                        long N, const TimeGrid& grid, const NoiseBundle& noise,
                                        uint32_t replica, const SolverOptions& opts) {
    return simulate_particles_impl(spec, xi, eps, N, grid, noise, replica, opts, 1, false);
}

PathGrid simulate_frozen(const ModelSpec& spec, const Segment& xi, double eps,
                         const NoiseStream& w, const PathGrid& x0, const SolverOptions& opts) {
    return simulate_frozen(spec, xi, eps, w, x0, dirac_table(x0), opts);
}

PathGrid simulate_frozen(const ModelSpec& spec, const Segment& xi, double eps,
                         const NoiseStream& w, const PathGrid& x0, const LawTable& ref_laws,
                         const SolverOptions& opts) {
    const TimeGrid& grid = x0.grid();
    check_xi(spec, xi, grid);
    if (eps < 0.0 || eps > 1.0) throw config_error("simulate_frozen: eps must be in [0,1]");
    if (static_cast<long>(ref_laws.size()) < grid.horizon_steps())
        throw config_error("simulate_frozen: law table too short");
    PathGrid out(grid, spec.dim_d);
    copy_initial(xi, out);
    const double h = grid.step();
    const double root_eps = std::sqrt(eps);
    const long d = grid.delay_steps();
    Vec dw(spec.dim_m), z(spec.dim_d);
    for (long k = d; k < d + grid.horizon_steps(); ++k) {
        const Segment seg = segment_at_node(out, k);
        const EmpiricalLaw& ref = ref_laws[static_cast<size_t>(k - d)];
        fill_brownian_increment(dw, w, h, k - d, spec.dim_m);
        z = out.node(k) - spec.D(seg) + h * spec.b(seg, ref) +
            root_eps * (spec.sigma(seg, ref) * dw);
        neutral_step_solve(spec, z, out, k + 1, opts);
    }
    return out;
}

PathGrid simulate_frozen_discretized(const ModelSpec& spec, const Segment& xi, double eps, long n,
                                     const NoiseStream& w, const PathGrid& x0,
                                     const SolverOptions& opts) {
    return simulate_frozen_discretized(spec, xi, eps, n, w, x0, dirac_table(x0),
                                       dirac_table_frozen(x0, n), opts);
}

PathGrid simulate_frozen_discretized(const ModelSpec& spec, const Segment& xi, double eps, long n,
                                     const NoiseStream& w, const PathGrid& x0,
                                     const LawTable& ref_laws, const LawTable& frozen_ref_laws,
                                     const SolverOptions& opts) {
    const TimeGrid& grid = x0.grid();
    check_xi(spec, xi, grid);
    if (eps < 0.0 || eps > 1.0)
        throw config_error("simulate_frozen_discretized: eps must be in [0,1]");
    const long cpb = grid.cells_per_block(n);
    if (static_cast<long>(ref_laws.size()) < grid.horizon_steps() ||
        static_cast<long>(frozen_ref_laws.size()) < grid.horizon_steps())
        throw config_error("simulate_frozen_discretized: law table too short");
    PathGrid out(grid, spec.dim_d);
    copy_initial(xi, out);
    const double h = grid.step();
    const double root_eps = std::sqrt(eps);
    const long d = grid.delay_steps();
    Vec dw(spec.dim_m), z(spec.dim_d);
    for (long k = d; k < d + grid.horizon_steps(); ++k) {
        const Segment seg = segment_at_node(out, k);
        const Segment frozen_seg = frozen_segment_at_node(out, k, cpb);
        fill_brownian_increment(dw, w, h, k - d, spec.dim_m);
        z = out.node(k) - spec.D(seg) +
            h * spec.b(seg, ref_laws[static_cast<size_t>(k - d)]) +
            root_eps *
                (spec.sigma(frozen_seg, frozen_ref_laws[static_cast<size_t>(k - d)]) * dw);
        neutral_step_solve(spec, z, out, k + 1, opts);
    }
    return out;
}

PathGrid simulate_truncated(const ModelSpec& spec, const Segment& xi, double eps, double R,
                            const NoiseStream& w, const PathGrid& x0, const SolverOptions& opts) {
    const ModelSpec trunc = truncate(spec, R);
    return simulate_frozen(trunc, xi, eps, w, x0, opts);
}

double ito_tail_bound(double A, double B, int d, double T, double R) {
    const double dd = static_cast<double>(d);
    const double num = R - std::sqrt(dd) * B * T;
    return 2.0 * dd * std::exp(-num * num / (2.0 * A * A * dd * T));
}

namespace {

ItoTailResult ito_tail_impl(double A, double B, int d, double T, double R, double h, long replicas,
                            const NoiseBundle& noise, int threads, bool parallel) {
    if (!(A > 0.0) || B < 0.0 || d < 1 || !(T > 0.0) || !(R > 0.0) || !(h > 0.0) || replicas < 1)
        throw config_error("ito_tail_check: bad parameters");
    if (!(std::sqrt(static_cast<double>(d)) * B * T < R))
        throw config_error("ito_tail_check: hypothesis sqrt(d) B T < R violated");
    const long steps = std::lround(T / h);
    if (steps < 1 || std::abs(T / h - static_cast<double>(steps)) > 1e-9)
        throw config_error("ito_tail_check: T must be a multiple of h");
    const double a_diag = A / std::sqrt(static_cast<double>(d));
    const double b_comp = B / std::sqrt(static_cast<double>(d));

    std::vector<char> hit(static_cast<size_t>(replicas), 0);
    const int nt = threads > 0 ? threads : omp_get_max_threads();
    auto run_one = [&](long r) {
        const NoiseStream w = noise.stream(static_cast<uint32_t>(r), 0);
        Vec x = Vec::Zero(d);
        bool over = false;
        for (long k = 0; k < steps && !over; ++k) {
            for (int c = 0; c < d; ++c)
                x[c] += b_comp * h + a_diag * w.increment(h, static_cast<uint32_t>(k),
                                                          static_cast<uint32_t>(c));
            if (x.norm() >= R) over = true;
        }
        hit[static_cast<size_t>(r)] = over ? 1 : 0;
    };
    if (parallel) {
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long r = 0; r < replicas; ++r) run_one(r);
    } else {
        for (long r = 0; r < replicas; ++r) run_one(r);
    }

    ItoTailResult res;
    res.replicas = replicas;
    for (long r = 0; r < replicas; ++r) res.hits += hit[static_cast<size_t>(r)];
    res.p_hat = static_cast<double>(res.hits) / static_cast<double>(replicas);
    const WilsonInterval ci = wilson_interval(res.hits, replicas);
    res.ci_lo = ci.lo;
    res.ci_hi = ci.hi;
    res.bound = ito_tail_bound(A, B, d, T, R);
    if (d == 1 && B == 0.0) res.reflection = brownian_sup_tail(R / A, T);
    return res;
}

}  // namespace

ItoTailResult ito_tail_check(double A, double B, int d, double T, double R, double h,
                             long replicas, const NoiseBundle& noise, int threads) {
    return ito_tail_impl(A, B, d, T, R, h, replicas, noise, threads, true);
}

ItoTailResult ito_tail_check_serial(double A, double B, int d, double T, double R, double h,
                                    long replicas, const NoiseBundle& noise) {
    return ito_tail_impl(A, B, d, T, R, h, replicas, noise, 1, false);
}

}  // namespace nmv
