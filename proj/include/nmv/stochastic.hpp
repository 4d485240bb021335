#pragma once

#include <vector>

#include "nmv/deterministic.hpp"
#include "nmv/noise.hpp"

namespace nmv {

/// N interacting copies driven by per-particle noise streams; the law in the
/// coefficients is the cloud's own empirical law at each step's start.
struct ParticleCloud {
    std::vector<PathGrid> paths;
    double eps = 0.0;

    long size() const { return static_cast<long>(paths.size()); }
    EmpiricalLaw law_at_node(long node) const {
        std::vector<Segment> atoms;
        atoms.reserve(paths.size());
        for (const PathGrid& p : paths) atoms.push_back(segment_at_node(p, node));
        return EmpiricalLaw(std::move(atoms));
    }
};

/// Euler-Maruyama on Z_i = X_i - D(X_{i,t}) for the interacting system.
/// Bit-identical for any `threads`; the serial twin is the reference the
/// parallel kernel is tested against.
ParticleCloud simulate_particles(const ModelSpec& spec, const Segment& xi, double eps, long N,
                                 const TimeGrid& grid, const NoiseBundle& noise, uint32_t replica,
                                 const SolverOptions& opts = {}, int threads = 0);
ParticleCloud simulate_particles_serial(const ModelSpec& spec, const Segment& xi, double eps,
                                        long N, const TimeGrid& grid, const NoiseBundle& noise,
                                        uint32_t replica, const SolverOptions& opts = {});

/// Single path with the law frozen at dirac(X0_t).  The overload taking a
/// LawTable (from dirac_table(x0)) skips rebuilding the reference law every
/// step; replica loops should build the table once and share it.
PathGrid simulate_frozen(const ModelSpec& spec, const Segment& xi, double eps,
                         const NoiseStream& w, const PathGrid& x0, const SolverOptions& opts = {});
PathGrid simulate_frozen(const ModelSpec& spec, const Segment& xi, double eps,
                         const NoiseStream& w, const PathGrid& x0, const LawTable& ref_laws,
                         const SolverOptions& opts = {});

/// Frozen-law path with the diffusion arguments additionally clamped at
/// t_n = floor(nt)/n; drift argument stays live.
PathGrid simulate_frozen_discretized(const ModelSpec& spec, const Segment& xi, double eps, long n,
                                     const NoiseStream& w, const PathGrid& x0,
                                     const SolverOptions& opts = {});
PathGrid simulate_frozen_discretized(const ModelSpec& spec, const Segment& xi, double eps, long n,
                                     const NoiseStream& w, const PathGrid& x0,
                                     const LawTable& ref_laws, const LawTable& frozen_ref_laws,
                                     const SolverOptions& opts = {});

/// simulate_frozen for the chi_R-truncated model.
PathGrid simulate_truncated(const ModelSpec& spec, const Segment& xi, double eps, double R,
                            const NoiseStream& w, const PathGrid& x0,
                            const SolverOptions& opts = {});

struct ItoTailResult {
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 1.0;
    double bound = 0.0;       // 2d exp(-(R - sqrt(d) B T)^2 / (2 A^2 d T))
    double reflection = -1.0; // exact tail for d = 1, B = 0; negative otherwise
    long hits = 0;
    long replicas = 0;
};

/// Empirical tail P(sup |xi(t)| >= R) of the bounded Ito process
/// xi = int alpha dW + int beta ds with ||alpha||_HS = A, |beta| = B,
/// against the closed-form exponential bound.  Requires sqrt(d) B T < R.
ItoTailResult ito_tail_check(double A, double B, int d, double T, double R, double h,
                             long replicas, const NoiseBundle& noise, int threads = 0);
ItoTailResult ito_tail_check_serial(double A, double B, int d, double T, double R, double h,
                                    long replicas, const NoiseBundle& noise);

double ito_tail_bound(double A, double B, int d, double T, double R);

}  // namespace nmv
