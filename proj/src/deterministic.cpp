#include "nmv/deterministic.hpp"

#include <cmath>

namespace nmv {

namespace {

void check_xi(const ModelSpec& spec, const Segment& xi, const TimeGrid& grid) {
    if (xi.dim() != spec.dim_d) throw config_error("solver: xi dimension mismatch");
    if (xi.delay_steps() != grid.delay_steps() || xi.step() != grid.step())
        throw config_error("solver: xi geometry does not match the grid");
}

void copy_initial(const Segment& xi, PathGrid& out) {
    const long d = out.grid().delay_steps();
    for (long i = 0; i <= d; ++i) out.set_node(i, xi.at_offset(i - d));
}

void check_control(const Control& phi, const ModelSpec& spec, const TimeGrid& grid) {
    if (phi.dim() != spec.dim_m) throw config_error("solver: control dimension mismatch");
    if (phi.step() != grid.step() || phi.cells() != grid.horizon_steps())
        throw config_error("solver: control grid does not match the time grid");
}

}  // namespace

Vec neutral_step_solve(const ModelSpec& spec, const Vec& z, PathGrid& path, long node,
                       const SolverOptions& opts) {
    if (!spec.head_dependent) {
        // D never reads theta = 0: one explicit evaluation.
        path.copy_node(node, node - 1);  // placeholder head
        const Vec x = z + spec.D(segment_at_node(path, node));
        path.set_node(node, x);
        return x;
    }
    Vec x = path.node(node - 1);  // warm start from the previous node
    path.set_node(node, x);
    const Segment seg = segment_at_node(path, node);
    const double scale = opts.fixed_point_tol * (1.0 + z.norm());
    for (int it = 0; it < opts.fixed_point_max_iter; ++it) {
        const Vec next = z + spec.D(seg);
        const double move = (next - x).norm();
        x = next;
        path.set_node(node, x);
        // residual of the pre-update iterate equals the move, so once the
        // move is below tol the returned point is within alpha * tol
        if (move <= scale) return x;
    }
    throw numeric_error("neutral_step_solve: fixed point did not converge (last move above tol)");
}

PathGrid solve_limit_ode(const ModelSpec& spec, const Segment& xi, const TimeGrid& grid,
                         const SolverOptions& opts) {
    check_xi(spec, xi, grid);
    PathGrid out(grid, spec.dim_d);
    copy_initial(xi, out);
    const double h = grid.step();
    const long d = grid.delay_steps();
    for (long k = d; k < d + grid.horizon_steps(); ++k) {
        const Segment seg = segment_at_node(out, k);
        const EmpiricalLaw law = dirac_at(seg);
        const Vec z = out.node(k) - spec.D(seg) + h * spec.b(seg, law);
        neutral_step_solve(spec, z, out, k + 1, opts);
    }
    return out;
}

PathGrid solve_skeleton(const ModelSpec& spec, const Segment& xi, const Control& phi,
                        const PathGrid& x0, const SolverOptions& opts) {
    return solve_skeleton(spec, xi, phi, x0, dirac_table(x0), opts);
}

PathGrid solve_skeleton(const ModelSpec& spec, const Segment& xi, const Control& phi,
                        const PathGrid& x0, const LawTable& ref_laws, const SolverOptions& opts) {
    const TimeGrid& grid = x0.grid();
    check_xi(spec, xi, grid);
    check_control(phi, spec, grid);
    if (static_cast<long>(ref_laws.size()) < grid.horizon_steps())
        throw config_error("solve_skeleton: law table too short");
    PathGrid out(grid, spec.dim_d);
    copy_initial(xi, out);
    const double h = grid.step();
    const long d = grid.delay_steps();
    Vec z(spec.dim_d);
    for (long k = d; k < d + grid.horizon_steps(); ++k) {
        const Segment seg = segment_at_node(out, k);
        const EmpiricalLaw& ref = ref_laws[static_cast<size_t>(k - d)];
        z = out.node(k) - spec.D(seg) + h * spec.b(seg, ref) +
            spec.sigma(seg, ref) * phi.delta(k - d);
        neutral_step_solve(spec, z, out, k + 1, opts);
    }
    return out;
}

PathGrid solve_skeleton_discretized(const ModelSpec& spec, const Segment& xi, const Control& phi,
                                    long n, const PathGrid& x0, const SolverOptions& opts) {
    const TimeGrid& grid = x0.grid();
    check_xi(spec, xi, grid);
    check_control(phi, spec, grid);
    const long cpb = grid.cells_per_block(n);
    PathGrid out(grid, spec.dim_d);
    copy_initial(xi, out);
    const double h = grid.step();
    const long d = grid.delay_steps();
    for (long k = d; k < d + grid.horizon_steps(); ++k) {
        const long cell = k - d;
        const long block = (cell / cpb) * cpb;  // steps past 0 of t_n
        const long clamp = block + d;           // node of t_n for this block
        const Segment seg = segment_at_node(out, k);
        const EmpiricalLaw ref = dirac_at(segment_at_node(x0, k));
        // control forcing: sigma evaluated on the clamped window, applied to
        // phi(t) - phi(t_n); per cell that contributes S(t_{k+1}) - S(t_k).
        // The closing evaluation at a block's right edge keeps this block's
        // clamp, so it never reads the node being solved for.
        const Vec s_hi = spec.sigma(Segment(out, k + 1, clamp),
                                    dirac_at(Segment(x0, k + 1, clamp))) *
                         (phi.node(cell + 1) - phi.node(block));
        Vec s_lo = Vec::Zero(spec.dim_d);
        if (cell != block)
            s_lo = spec.sigma(Segment(out, k, clamp), dirac_at(Segment(x0, k, clamp))) *
                   (phi.node(cell) - phi.node(block));
        const Vec z = out.node(k) - spec.D(seg) + h * spec.b(seg, ref) + (s_hi - s_lo);
        neutral_step_solve(spec, z, out, k + 1, opts);
    }
    return out;
}

}  // namespace nmv
