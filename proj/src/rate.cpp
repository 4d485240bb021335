#include "nmv/rate.hpp"

#include <omp.h>

#include <cmath>
#include <deque>
#include <vector>

#include "nmv/noise.hpp"

namespace nmv {

double event_violation(const RareEvent& event, const PathGrid& f) {
    switch (event.kind) {
        case EventKind::terminal_target: {
            const Vec end = f.node(f.grid().node_count() - 1);
            return std::max(0.0, (end - event.target).norm() - event.tol);
        }
        case EventKind::sup_exceed: {
            double s = 0.0;
            for (long i = 0; i < f.grid().node_count(); ++i)
                s = std::max(s, (f.node(i) - event.reference->node(i)).norm());
            return std::max(0.0, event.delta - s);
        }
    }
    return 0.0;
}

bool event_occurs(const RareEvent& event, const PathGrid& f) {
    return event_violation(event, f) == 0.0;
}

namespace {

struct Objective {
    const ModelSpec& spec;
    const Segment& xi;
    const PathGrid& x0;
    const LawTable& ref_laws;
    const RareEvent& event;
    const MinimizeOptions& opts;
    double penalty = 0.0;

    // variables are phi(t_1)..phi(t_K) flattened; phi(0) stays 0
    double operator()(Control& phi, const std::vector<double>& vars) const {
        std::copy(vars.begin(), vars.end(), phi.raw().begin() + phi.dim());
        const PathGrid m = solve_skeleton(spec, xi, phi, x0, ref_laws, opts.solver);
        const double v = event_violation(event, m);
        return action(phi) + penalty * v * v;
    }
};

// Two-loop L-BFGS with central-difference gradients and Armijo backtracking.
// Plain descent is enough here: the action is a nice quadratic and the
// penalty adds one stiff direction per active constraint.
int lbfgs_descend(const Objective& obj, Control& phi, std::vector<double>& x,
                  const MinimizeOptions& opts) {
    const size_t n = x.size();
    auto grad = [&](const std::vector<double>& at, std::vector<double>& g) {
        std::vector<double> p = at;
        for (size_t i = 0; i < n; ++i) {
            const double h = opts.fd_step * (1.0 + std::abs(at[i]));
            p[i] = at[i] + h;
            const double fp = obj(phi, p);
            p[i] = at[i] - h;
            const double fm = obj(phi, p);
            p[i] = at[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
    };

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> g(n), g_new(n), dir(n), x_new(n);
    double f = obj(phi, x);
    grad(x, g);
    int iters = 0;
    for (; iters < opts.iters_per_stage; ++iters) {
        double gnorm = 0.0;
        for (double v : g) gnorm += v * v;
        if (std::sqrt(gnorm) <= opts.grad_tol * (1.0 + std::abs(f))) break;

        // two-loop recursion
        dir = g;
        std::vector<double> alpha(s_hist.size());
        for (size_t j = s_hist.size(); j-- > 0;) {
            double sd = 0.0;
            for (size_t i = 0; i < n; ++i) sd += s_hist[j][i] * dir[i];
            alpha[j] = rho_hist[j] * sd;
            for (size_t i = 0; i < n; ++i) dir[i] -= alpha[j] * y_hist[j][i];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            for (size_t i = 0; i < n; ++i) {
                sy += s[i] * y[i];
                yy += y[i] * y[i];
            }
            const double scale = sy / std::max(yy, 1e-300);
            for (double& v : dir) v *= scale;
        }
        for (size_t j = 0; j < s_hist.size(); ++j) {
            double yd = 0.0;
            for (size_t i = 0; i < n; ++i) yd += y_hist[j][i] * dir[i];
            const double beta = rho_hist[j] * yd;
            for (size_t i = 0; i < n; ++i) dir[i] += s_hist[j][i] * (alpha[j] - beta);
        }
        for (double& v : dir) v = -v;

        double slope = 0.0;
        for (size_t i = 0; i < n; ++i) slope += g[i] * dir[i];
        if (slope >= 0.0) {  // fall back to steepest descent
            for (size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = -gnorm;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
            f_new = obj(phi, x_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        grad(x_new, g_new);
        std::vector<double> s(n), y(n);
        double sy = 0.0;
        for (size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-14) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.lbfgs_memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x.swap(x_new);
        g.swap(g_new);
        const double f_prev = f;
        f = f_new;
        if (std::abs(f_prev - f) <= 1e-14 * (1.0 + std::abs(f))) break;
    }
    return iters;
}

}  // namespace

RateEstimate minimize_rate(const ModelSpec& spec, const Segment& xi, const PathGrid& x0,
                           const RareEvent& event, const Control& init,
                           const MinimizeOptions& opts) {
    const TimeGrid& grid = x0.grid();
    if (init.cells() != grid.horizon_steps() || init.step() != grid.step())
        throw config_error("minimize_rate: control grid mismatch");
    Control phi = init;
    std::vector<double> vars(phi.raw().begin() + phi.dim(), phi.raw().end());

    const LawTable ref_laws = dirac_table(x0);
    Objective obj{spec, xi, x0, ref_laws, event, opts};
    int total_iters = 0;
    double penalty = opts.penalty_init;
    for (int stage = 0; stage < opts.stages; ++stage) {
        obj.penalty = penalty;
        total_iters += lbfgs_descend(obj, phi, vars, opts);
        penalty *= opts.penalty_growth;
    }
    std::copy(vars.begin(), vars.end(), phi.raw().begin() + phi.dim());

    RateEstimate est;
    est.argmin = phi;
    est.value = action(phi);
    est.iterations = total_iters;
    const PathGrid m = solve_skeleton(spec, xi, phi, x0, opts.solver);
    est.residual = event_violation(event, m);
    est.converged = est.residual <= opts.constraint_tol;
    return est;
}

RateEstimate rate_lower_bound_scan(const ModelSpec& spec, const Segment& xi, const PathGrid& x0,
                                   const RareEvent& event, int restarts, uint64_t master_seed,
                                   const MinimizeOptions& opts, int threads) {
    if (restarts < 1) throw config_error("rate_lower_bound_scan: restarts must be >= 1");
    const TimeGrid& grid = x0.grid();
    std::vector<RateEstimate> results(static_cast<size_t>(restarts));
    const int nt = threads > 0 ? threads : omp_get_max_threads();

    auto make_init = [&](int r) {
        // restart 0 is a deterministic unit ramp; the zero control sits on a
        // symmetric saddle of sup-type penalties where central differences
        // cancel, so it makes a poor first start
        if (r == 0) return linear_control(grid.horizon(), grid.step(), spec.dim_m);
        Control c(grid.horizon(), grid.step(), spec.dim_m);
        // random walk scaled to modest action, deterministic per restart
        const NoiseStream s{master_seed, static_cast<uint32_t>(r), 0x1a7eu};
        const double scale = 0.5 * (1.0 + static_cast<double>(r % 4));
        Vec acc = Vec::Zero(spec.dim_m);
        for (long k = 1; k <= c.cells(); ++k) {
            for (int cc = 0; cc < spec.dim_m; ++cc)
                acc[cc] += scale * s.increment(grid.step(), static_cast<uint32_t>(k),
                                               static_cast<uint32_t>(cc));
            c.set_node(k, acc);
        }
        return c;
    };

#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int r = 0; r < restarts; ++r)
        results[static_cast<size_t>(r)] = minimize_rate(spec, xi, x0, event, make_init(r), opts);

    // running minimum in restart order; unconverged results only count when
    // nothing converged at all
    RateEstimate best = results[0];
    for (int r = 1; r < restarts; ++r) {
        const RateEstimate& cur = results[static_cast<size_t>(r)];
        const bool better = (cur.converged && !best.converged) ||
                            (cur.converged == best.converged && cur.value < best.value);
        if (better) best = cur;
    }
    for (const RateEstimate& r : results) best.iterations = std::max(best.iterations, r.iterations);
    return best;
}

}  // namespace nmv
