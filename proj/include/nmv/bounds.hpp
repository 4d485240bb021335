#pragma once

#include "nmv/errors.hpp"

namespace nmv {

/// Closed-form constants of the moment and convergence estimates, evaluated
/// directly from the displayed formulas.  The exponentials overflow fast, so
/// each bound also carries its natural log; the plain value is +inf then.
struct PaperBounds {
    double L2 = 0.0;
    double L3 = 0.0;       // bound on E[sup ||X^eps_t||^2]
    double log_L3 = 0.0;
    double X0_bound = 0.0; // deterministic bound on sup ||X^0_t||^2
    double log_X0_bound = 0.0;
    double L4 = 0.0;       // bound on E[sup ||X^eps_t - X^0_t||^2]
    double log_L4 = 0.0;
};

PaperBounds compute_paper_bounds(double alpha, double L, double L1, double T, double eps,
                                 double norm_xi);

}  // namespace nmv
