#pragma once

#include <algorithm>

#include "nmv/path_grid.hpp"

namespace nmv {

/// Window view xi_t = { path(t + theta), theta in [-tau, 0] }.
///
/// A segment never owns data; it reads the path it was anchored on.  The
/// clamp node implements the frozen variant path((t+theta) ^ t_n): a plain
/// segment has clamp == anchor, which leaves every lookup untouched.
class Segment {
  public:
    Segment(const PathGrid& path, long anchor_node, long clamp_node)
        : path_(&path), anchor_(anchor_node), clamp_(clamp_node) {}

    int dim() const { return path_->dim(); }
    long delay_steps() const { return path_->grid().delay_steps(); }
    double step() const { return path_->grid().step(); }
    long anchor_node() const { return anchor_; }
    double anchor_time() const { return path_->grid().time_at(anchor_); }

    /// Value at node offset k from the anchor, k in [-delay_steps, 0].
    Eigen::Map<const Vec> at_offset(long k) const {
        return path_->node(std::min(anchor_ + k, clamp_));
    }

    /// xi(0), the head of the window.
    Eigen::Map<const Vec> head() const { return at_offset(0); }

    /// Value at a grid-aligned theta in [-tau, 0].
    Eigen::Map<const Vec> at_theta(double theta) const {
        const double raw = theta / step();
        const long k = std::lround(raw);
        if (std::abs(raw - static_cast<double>(k)) > 1e-9 || k > 0 || k < -delay_steps())
            throw config_error("Segment::at_theta: theta off-grid or outside [-tau, 0]");
        return at_offset(k);
    }

    bool same_geometry(const Segment& o) const {
        return dim() == o.dim() && delay_steps() == o.delay_steps() && step() == o.step();
    }

  private:
    const PathGrid* path_;
    long anchor_;
    long clamp_;
};

/// sup-norm over the window: max Euclidean length of the covered node values.
inline double sup_norm(const Segment& seg) {
    double m = 0.0;
    for (long k = -seg.delay_steps(); k <= 0; ++k) m = std::max(m, seg.at_offset(k).norm());
    return m;
}

/// sup-norm of the difference of two geometry-compatible segments.
inline double sup_norm_diff(const Segment& a, const Segment& b) {
    if (!a.same_geometry(b)) throw config_error("sup_norm_diff: incompatible segments");
    double m = 0.0;
    for (long k = -a.delay_steps(); k <= 0; ++k)
        m = std::max(m, (a.at_offset(k) - b.at_offset(k)).norm());
    return m;
}

/// Segment of `path` anchored at grid-aligned t in [0, T].
inline Segment segment_at(const PathGrid& path, double t) {
    if (t < -1e-12) throw config_error("segment_at: t must be in [0, T]");
    const long i = path.grid().index_of(t);
    return Segment(path, i, i);
}

inline Segment segment_at_node(const PathGrid& path, long node) {
    if (node < path.grid().delay_steps() || node >= path.grid().node_count())
        throw config_error("segment_at_node: anchor outside [0, T]");
    return Segment(path, node, node);
}

/// Frozen window theta -> path((t + theta) ^ t_n) with t_n = floor(n t)/n.
/// Requires 1/n to be a multiple of h; agrees with segment_at when t = t_n.
inline Segment frozen_segment_at(const PathGrid& path, double t, long n) {
    const long cpb = path.grid().cells_per_block(n);
    if (t < -1e-12) throw config_error("frozen_segment_at: t must be in [0, T]");
    const long i = path.grid().index_of(t);
    const long k = i - path.grid().delay_steps();  // steps past t = 0
    const long block_start = (k / cpb) * cpb;
    return Segment(path, i, block_start + path.grid().delay_steps());
}

inline Segment frozen_segment_at_node(const PathGrid& path, long node, long cells_per_block) {
    const long d = path.grid().delay_steps();
    const long k = node - d;
    if (k < 0) throw config_error("frozen_segment_at_node: anchor before t = 0");
    return Segment(path, node, (k / cells_per_block) * cells_per_block + d);
}

}  // namespace nmv
