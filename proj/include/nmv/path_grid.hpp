#pragma once

#include <Eigen/Core>
#include <vector>

#include "nmv/time_grid.hpp"

namespace nmv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A continuous path on [-tau, T]: one d-vector per grid node, piecewise
/// linear in between.  Solvers fill nodes front to back; everything else
/// treats a PathGrid as an immutable value.
class PathGrid {
  public:
    PathGrid(const TimeGrid& grid, int dim)
        : grid_(grid), dim_(dim), data_(static_cast<size_t>(grid.node_count()) * dim, 0.0) {
        if (dim < 1) throw config_error("PathGrid: dim must be >= 1");
    }

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }

    Eigen::Map<const Vec> node(long i) const {
        return Eigen::Map<const Vec>(data_.data() + static_cast<size_t>(i) * dim_, dim_);
    }
    void set_node(long i, const Vec& v) {
        Eigen::Map<Vec>(data_.data() + static_cast<size_t>(i) * dim_, dim_) = v;
    }
    void copy_node(long to, long from) {
        std::copy_n(data_.data() + static_cast<size_t>(from) * dim_, dim_,
                    data_.data() + static_cast<size_t>(to) * dim_);
    }

    /// Linear interpolation at any t in [-tau, T].
    Vec eval(double t) const {
        const double pos = t / grid_.step() + static_cast<double>(grid_.delay_steps());
        long lo = static_cast<long>(std::floor(pos));
        if (lo < 0 || pos < 0.0) throw config_error("PathGrid::eval: t below -tau");
        if (lo >= grid_.node_count() - 1) {
            if (pos > static_cast<double>(grid_.node_count() - 1) + 1e-9)
                throw config_error("PathGrid::eval: t above T");
            lo = grid_.node_count() - 2;
        }
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * node(lo) + w * node(lo + 1);
    }

    const std::vector<double>& raw() const { return data_; }

  private:
    TimeGrid grid_;
    int dim_;
    std::vector<double> data_;
};

/// Max over nodes of the Euclidean gap between two paths on the same grid.
inline double sup_gap(const PathGrid& a, const PathGrid& b) {
    if (!a.grid().same_geometry(b.grid()) || a.dim() != b.dim())
        throw config_error("sup_gap: paths on different grids");
    double m = 0.0;
    for (long i = 0; i < a.grid().node_count(); ++i)
        m = std::max(m, (a.node(i) - b.node(i)).norm());
    return m;
}

/// Path equal to `value` at every node of [-tau, 0] (and zero elsewhere);
/// the usual way to set up a constant initial datum.
inline PathGrid constant_initial_path(const TimeGrid& grid, const Vec& value) {
    PathGrid p(grid, static_cast<int>(value.size()));
    for (long i = 0; i <= grid.delay_steps(); ++i) p.set_node(i, value);
    return p;
}

}  // namespace nmv
