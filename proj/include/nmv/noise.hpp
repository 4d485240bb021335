#pragma once

#include <cmath>
#include <cstdint>

namespace nmv {

// Philox4x32-10 (Salmon et al., SC 2011).  Counter-based: every draw is a
// pure function of (key, counter), so any parallel schedule reproduces the
// same stream.
namespace philox {

struct Block {
    uint32_t v[4];
};

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    lo = static_cast<uint32_t>(p);
    hi = static_cast<uint32_t>(p >> 32);
}

inline Block round10(Block ctr, uint32_t k0, uint32_t k1) {
    constexpr uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        uint32_t hi0, lo0, hi1, lo1;
        mul_hi_lo(kM0, ctr.v[0], hi0, lo0);
        mul_hi_lo(kM1, ctr.v[2], hi1, lo1);
        const Block next{{hi1 ^ ctr.v[1] ^ k0, lo1, hi0 ^ ctr.v[3] ^ k1, lo0}};
        ctr = next;
        k0 += kW0;
        k1 += kW1;
    }
    return ctr;
}

}  // namespace philox

/// One replica/particle noise stream.  normal(cell, comp) is the comp-th
/// standard Gaussian attached to grid cell `cell`, identical however many
/// workers are running.
struct NoiseStream {
    uint64_t master_seed = 0;
    uint32_t replica = 0;
    uint32_t particle = 0;

    double normal(uint32_t cell, uint32_t comp = 0) const {
        const philox::Block ctr{{cell, comp >> 1, particle, replica}};
        const philox::Block out = philox::round10(ctr, static_cast<uint32_t>(master_seed),
                                                  static_cast<uint32_t>(master_seed >> 32));
        const uint64_t a = (static_cast<uint64_t>(out.v[0]) << 32) | out.v[1];
        const uint64_t b = (static_cast<uint64_t>(out.v[2]) << 32) | out.v[3];
        // Box-Muller; u1 in (0, 1], u2 in [0, 1).
        const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        return (comp & 1u) ? r * std::sin(ang) : r * std::cos(ang);
    }

    /// Brownian increment over one cell of width h: sqrt(h) * N(0,1).
    double increment(double h, uint32_t cell, uint32_t comp = 0) const {
        return std::sqrt(h) * normal(cell, comp);
    }
};

/// Family of streams under one master seed.
struct NoiseBundle {
    uint64_t master_seed = 0;
    NoiseStream stream(uint32_t replica, uint32_t particle = 0) const {
        return NoiseStream{master_seed, replica, particle};
    }
};

}  // namespace nmv
