#pragma once

#include "nmv/control.hpp"
#include "nmv/model_spec.hpp"

namespace nmv {

struct SolverOptions {
    double fixed_point_tol = 1e-12;
    int fixed_point_max_iter = 100;
};

/// Invert x -> x - D(segment with head x) at one node: writes the solution
/// into path[node] and returns it.  All nodes before `node` must be filled.
/// The contraction constant alpha < 1 makes the iteration geometric; when D
/// never reads the head the solve is one explicit evaluation.
Vec neutral_step_solve(const ModelSpec& spec, const Vec& z, PathGrid& path, long node,
                       const SolverOptions& opts = {});

/// Noise-free limit: explicit Euler on Z(t) = X(t) - D(X_t) with drift
/// b(X_t, dirac(X_t)), neutral inversion each step.  xi must match the grid
/// geometry; the output carries xi exactly on [-tau, 0].
PathGrid solve_limit_ode(const ModelSpec& spec, const Segment& xi, const TimeGrid& grid,
                         const SolverOptions& opts = {});

/// Controlled skeleton: drift b(., dirac(X0_t)) plus sigma(., dirac(X0_t))
/// phi_dot, marched like the limit ODE.  x0 must come from solve_limit_ode
/// on the same grid so every scheme freezes the identical reference law.
/// The LawTable overload (dirac_table(x0)) serves repeated solves.
PathGrid solve_skeleton(const ModelSpec& spec, const Segment& xi, const Control& phi,
                        const PathGrid& x0, const SolverOptions& opts = {});
PathGrid solve_skeleton(const ModelSpec& spec, const Segment& xi, const Control& phi,
                        const PathGrid& x0, const LawTable& ref_laws,
                        const SolverOptions& opts = {});

/// Skeleton of the time-discretized scheme: the drift argument stays live,
/// the diffusion factor is evaluated on windows clamped at t_n = floor(nt)/n
/// and multiplies phi(t) - phi(t_n) blockwise.
PathGrid solve_skeleton_discretized(const ModelSpec& spec, const Segment& xi, const Control& phi,
                                    long n, const PathGrid& x0, const SolverOptions& opts = {});

}  // namespace nmv
