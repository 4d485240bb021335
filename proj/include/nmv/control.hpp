#pragma once

#include <vector>

#include "nmv/path_grid.hpp"

namespace nmv {

/// Absolutely continuous control phi on [0, T] with phi(0) = 0, stored as
/// node values with piecewise-constant derivative per cell.  The action
/// 1/2 int |phi_dot|^2 is exact for this representation.
class Control {
  public:
    Control(double T, double h, int dim_m)
        : T_(T), h_(h), dim_(dim_m) {
        if (!(T > 0.0) || !(h > 0.0)) throw config_error("Control: T, h must be positive");
        const double raw = T / h;
        cells_ = std::lround(raw);
        if (cells_ < 1 || std::abs(raw - static_cast<double>(cells_)) > 1e-9)
            throw config_error("Control: T must be an integer multiple of h");
        if (dim_m < 1) throw config_error("Control: dim must be >= 1");
        values_.assign(static_cast<size_t>(cells_ + 1) * dim_, 0.0);
    }

    double horizon() const { return T_; }
    double step() const { return h_; }
    int dim() const { return dim_; }
    long cells() const { return cells_; }

    Eigen::Map<const Vec> node(long k) const {
        return Eigen::Map<const Vec>(values_.data() + static_cast<size_t>(k) * dim_, dim_);
    }
    void set_node(long k, const Vec& v) {
        if (k == 0) throw config_error("Control: phi(0) = 0 is fixed");
        Eigen::Map<Vec>(values_.data() + static_cast<size_t>(k) * dim_, dim_) = v;
    }

    /// Increment phi(t_{k+1}) - phi(t_k) over cell k.
    Vec delta(long k) const { return node(k + 1) - node(k); }

    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

  private:
    double T_, h_;
    int dim_;
    long cells_;
    std::vector<double> values_;
};

/// I(phi) = 1/2 int_0^T |phi_dot|^2 ds, exact for the stored representation.
inline double action(const Control& phi) {
    double s = 0.0;
    for (long k = 0; k < phi.cells(); ++k) s += phi.delta(k).squaredNorm();
    return 0.5 * s / phi.step();
}

/// phi(t) = slope * t, the straight line.
inline Control linear_control(double T, double h, int dim_m, double slope = 1.0) {
    Control c(T, h, dim_m);
    for (long k = 1; k <= c.cells(); ++k) {
        Vec v = Vec::Constant(dim_m, slope * static_cast<double>(k) * h);
        c.set_node(k, v);
    }
    return c;
}

}  // namespace nmv
