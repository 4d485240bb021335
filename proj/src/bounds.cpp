#include "nmv/bounds.hpp"

#include <cmath>
#include <limits>

namespace nmv {

namespace {

double exp_or_inf(double log_value) {
    return log_value > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_value);
}

}  // namespace

PaperBounds compute_paper_bounds(double alpha, double L, double L1, double T, double eps,
                                 double norm_xi) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw config_error("compute_paper_bounds: alpha must be in [0, 1)");
    if (!(L > 0.0) || !(L1 > 0.0) || !(T > 0.0) || eps < 0.0 || norm_xi < 0.0)
        throw config_error("compute_paper_bounds: constants out of range");

    PaperBounds out;
    const double op = 1.0 + alpha;
    out.L2 = std::max(L + op * op, L + L1);
    const double om2 = (1.0 - alpha) * (1.0 - alpha);
    const double xi2 = norm_xi * norm_xi;

    const double drive = 2.0 * out.L2 * T * (1.0 + 65.0 * eps);
    const double l3_pre = ((2.0 * alpha * alpha + 3.0 * alpha + 3.0) * xi2 + drive) / om2;
    out.log_L3 = std::log(l3_pre) + 2.0 * drive / om2;
    out.L3 = exp_or_inf(out.log_L3);

    const double x0_pre = ((alpha * alpha + alpha + 2.0) * xi2 + out.L2 * T) / om2;
    out.log_X0_bound = std::log(x0_pre) + 2.0 * out.L2 * T / om2;
    out.X0_bound = exp_or_inf(out.log_X0_bound);

    if (eps == 0.0) {
        out.L4 = 0.0;
        out.log_L4 = -std::numeric_limits<double>::infinity();
    } else {
        const double log1p_2l3 =
            out.log_L3 > 700.0 ? std::log(2.0) + out.log_L3 : std::log1p(2.0 * out.L3);
        out.log_L4 = std::log(130.0 * eps * out.L2 * T) - std::log(om2) + log1p_2l3 +
                     4.0 * L / om2;
        out.L4 = exp_or_inf(out.log_L4);
    }
    return out;
}

}  // namespace nmv
