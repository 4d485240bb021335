#pragma once

#include <vector>

#include "nmv/empirical_law.hpp"
#include "nmv/noise.hpp"

namespace nmv {

/// Deterministic generator of random segments and small empirical laws for
/// the assumption audits.  Segments are Brownian-bridge-like: endpoints
/// uniform in [-range, range], interior filled with bridge noise and clipped
/// back into the box.  Everything is a pure function of (seed, trial, role),
/// so a witness can always be regenerated.
class SegmentSampler {
  public:
    SegmentSampler(int dim, double tau = 0.5, double h = 1.0 / 16.0, double range = 5.0,
                   uint64_t seed = 0x5a9e5eedull)
        : dim_(dim), grid_(tau, h, h), range_(range), seed_(seed) {}

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }

    /// Path on [-tau, h] whose segment at t = 0 is the sample.
    PathGrid sample_path(uint32_t trial, uint32_t role) const {
        PathGrid p(grid_, dim_);
        const NoiseStream s{seed_, trial, role};
        const long d = grid_.delay_steps();
        Vec a(dim_), z(dim_);
        for (int c = 0; c < dim_; ++c) a[c] = range_ * uniform_pm1(s, 0, static_cast<uint32_t>(c));
        Vec bb(dim_);
        for (int c = 0; c < dim_; ++c) bb[c] = range_ * uniform_pm1(s, 1, static_cast<uint32_t>(c));
        for (long i = 0; i <= d; ++i) {
            const double w = static_cast<double>(i) / static_cast<double>(d);
            for (int c = 0; c < dim_; ++c) {
                const double bridge =
                    0.5 * range_ * std::sqrt(std::max(0.0, w * (1.0 - w))) *
                    s.normal(static_cast<uint32_t>(2 + i), static_cast<uint32_t>(c));
                double v = (1.0 - w) * a[c] + w * bb[c] + bridge;
                v = std::min(range_, std::max(-range_, v));
                z[c] = v;
            }
            p.set_node(i, z);
        }
        p.set_node(d + 1, p.node(d));  // pad the single horizon node
        return p;
    }

    /// Same, rescaled so the segment sup-norm is at most `cap`.
    PathGrid sample_path_capped(uint32_t trial, uint32_t role, double cap) const {
        PathGrid p = sample_path(trial, role);
        const double n = sup_norm(segment_at(p, 0.0));
        if (n > cap && n > 0.0) {
            const double f = cap / n;
            for (long i = 0; i < p.grid().node_count(); ++i) p.set_node(i, f * p.node(i));
        }
        return p;
    }

    /// Number of atoms used for the laws of a given trial, in [1, max_atoms].
    long law_size(uint32_t trial, long max_atoms = 8) const {
        const NoiseStream s{seed_, trial, 0xa70u};
        const double u = 0.5 * (uniform_pm1(s, 0, 0) + 1.0);
        long n = 1 + static_cast<long>(u * static_cast<double>(max_atoms));
        return std::min(n, max_atoms);
    }

  private:
    static double uniform_pm1(const NoiseStream& s, uint32_t cell, uint32_t comp) {
        // squash a normal through erf for a cheap symmetric bounded draw
        return std::erf(s.normal(cell, comp) * 0.70710678118654752440);
    }

    int dim_;
    TimeGrid grid_;
    double range_;
    uint64_t seed_;
};

}  // namespace nmv
