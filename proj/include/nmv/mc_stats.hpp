#pragma once

#include <cmath>

namespace nmv {

inline double normal_cdf_upper(double x) { return 0.5 * std::erfc(x / 1.4142135623730951); }

struct WilsonInterval {
    double lo = 0.0, hi = 1.0;
};

/// Wilson 95% score interval for k successes out of n.
inline WilsonInterval wilson_interval(long k, long n, double z = 1.959963984540054) {
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (k == 0) ci.lo = 0.0;
    if (k == n) ci.hi = 1.0;
    return ci;
}

/// P(sup_{[0,T]} |W(t)| >= a) for scalar Brownian motion, by the reflection
/// series 4 * sum_k (-1)^k Phi_bar((2k+1) a / sqrt(T)).
inline double brownian_sup_tail(double a, double T = 1.0) {
    if (a <= 0.0) return 1.0;
    const double s = a / std::sqrt(T);
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 0; k < 64; ++k) {
        const double term = normal_cdf_upper((2.0 * k + 1.0) * s);
        if (term < 1e-300) break;
        sum += sign * term;
        sign = -sign;
    }
    return std::min(1.0, 4.0 * sum);
}

}  // namespace nmv
