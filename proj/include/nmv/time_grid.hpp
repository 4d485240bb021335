#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "nmv/errors.hpp"

namespace nmv {

/// Uniform time grid covering [-tau, T] with step h.
///
/// tau and T must both be integer multiples of h; this keeps every delay
/// lookup and every block time floor(n t)/n on a node, so the solvers never
/// interpolate inside a scheme.  Node i sits at time (i - delay_steps()) * h.
class TimeGrid {
  public:
    TimeGrid(double tau, double T, double h) : tau_(tau), T_(T), h_(h) {
        if (!(tau > 0.0) || !(T > 0.0) || !(h > 0.0))
            throw config_error("TimeGrid: tau, T, h must be positive");
        delay_steps_ = to_steps(tau, "tau");
        horizon_steps_ = to_steps(T, "T");
    }

    double tau() const { return tau_; }
    double horizon() const { return T_; }
    double step() const { return h_; }
    long delay_steps() const { return delay_steps_; }
    long horizon_steps() const { return horizon_steps_; }
    long node_count() const { return delay_steps_ + horizon_steps_ + 1; }

    /// Time of node i; node delay_steps() is t = 0.
    double time_at(long i) const { return static_cast<double>(i - delay_steps_) * h_; }

    /// Node index of a grid-aligned time t in [-tau, T]; throws if t is
    /// off-grid or outside the covered interval.
    long index_of(double t) const {
        const double raw = t / h_;
        const long k = std::lround(raw);
        if (std::abs(raw - static_cast<double>(k)) > kAlignTol)
            throw config_error("TimeGrid: time is not grid-aligned");
        const long i = k + delay_steps_;
        if (i < 0 || i >= node_count())
            throw config_error("TimeGrid: time outside [-tau, T]");
        return i;
    }

    /// Cells per 1/n block; requires 1/n to be an integer multiple of h.
    long cells_per_block(long n) const {
        if (n < 1) throw config_error("TimeGrid: n must be >= 1");
        const double raw = 1.0 / (static_cast<double>(n) * h_);
        const long c = std::lround(raw);
        if (c < 1 || std::abs(raw - static_cast<double>(c)) > kAlignTol)
            throw config_error("TimeGrid: 1/n is not a multiple of h");
        return c;
    }

    bool same_geometry(const TimeGrid& o) const {
        return delay_steps_ == o.delay_steps_ && horizon_steps_ == o.horizon_steps_ && h_ == o.h_;
    }

  private:
    static constexpr double kAlignTol = 1e-9;

    long to_steps(double x, const char* name) const {
        const double raw = x / h_;
        const long k = std::lround(raw);
        if (k < 1 || std::abs(raw - static_cast<double>(k)) > kAlignTol * std::max(1.0, raw))
            throw config_error(std::string("TimeGrid: ") + name + " is not an integer multiple of h");
        return k;
    }

    double tau_, T_, h_;
    long delay_steps_, horizon_steps_;
};

}  // namespace nmv
