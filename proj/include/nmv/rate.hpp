#pragma once

#include <cstdint>

#include "nmv/deterministic.hpp"

namespace nmv {

enum class EventKind { terminal_target, sup_exceed };

/// Concrete rare-event families the rate machinery can score:
///  - terminal_target: |f(T) - x*| <= tol
///  - sup_exceed:      sup_t |f(t) - reference(t)| >= delta
struct RareEvent {
    EventKind kind;
    Vec target;         // terminal_target
    double tol = 0.0;   // terminal_target
    double delta = 0.0; // sup_exceed
    const PathGrid* reference = nullptr;  // sup_exceed

    static RareEvent terminal(Vec x_star, double tol) {
        if (!(tol > 0.0)) throw config_error("RareEvent: terminal tol must be positive");
        RareEvent e{EventKind::terminal_target, std::move(x_star), tol, 0.0, nullptr};
        return e;
    }
    static RareEvent sup_exceed(double delta, const PathGrid& reference) {
        if (!(delta > 0.0)) throw config_error("RareEvent: delta must be positive");
        RareEvent e{EventKind::sup_exceed, Vec(), 0.0, delta, &reference};
        return e;
    }
};

/// Distance of a path from the event's feasible set (0 when inside).
double event_violation(const RareEvent& event, const PathGrid& f);

/// Whether a simulated path realizes the event (used by the Monte Carlo side).
bool event_occurs(const RareEvent& event, const PathGrid& f);

struct RateEstimate {
    double value = 0.0;
    Control argmin{1.0, 1.0, 1};
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

struct MinimizeOptions {
    double penalty_init = 100.0;
    double penalty_growth = 10.0;
    int stages = 5;
    int iters_per_stage = 500;
    double fd_step = 1e-6;
    double grad_tol = 1e-9;
    double constraint_tol = 1e-5;
    int lbfgs_memory = 10;
    SolverOptions solver{};
};

/// Penalty-continuation descent for inf { I(phi) : M(phi) in event }.
/// Returns the best control found; `converged` means the constraint residual
/// ended below tolerance, otherwise the value is only an upper-bound attempt
/// and is reported as such.
RateEstimate minimize_rate(const ModelSpec& spec, const Segment& xi, const PathGrid& x0,
                           const RareEvent& event, const Control& init,
                           const MinimizeOptions& opts = {});

/// Best of minimize_rate over randomized starts (restart 0 is the zero
/// control); the running minimum is reduced in restart order.
RateEstimate rate_lower_bound_scan(const ModelSpec& spec, const Segment& xi, const PathGrid& x0,
                                   const RareEvent& event, int restarts, uint64_t master_seed,
                                   const MinimizeOptions& opts = {}, int threads = 0);

}  // namespace nmv
