// nmvlab: config-driven experiment runner for the neutral mean-field SDE lab.
//
// Subcommands: sweep, equivalence, mn-convergence, rate, audit, bounds.
// Exit codes: 0 ok, 1 config error, 2 numeric failure, 3 failed --check.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include "nmv/audit.hpp"
#include "nmv/builtin_models.hpp"
#include "nmv/harness.hpp"

namespace {

using namespace nmv;
using harness::Config;

std::string resolve_out_dir(const std::string& configured) {
    if (const char* env = std::getenv("NMVLAB_OUT_DIR")) return env;
    return configured;
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_sweep(const std::string& config_path, int threads, bool check) {
    const auto t0 = std::chrono::steady_clock::now();
    Config cfg = Config::from_file(config_path);
    const std::string process = cfg.get("sweep", "process");
    if (process != "particles" && process != "frozen")
        throw config_error("sweep.process must be particles or frozen");
    harness::Experiment ex = harness::experiment_from_config(cfg, process == "particles");
    ex.threads = threads;
    const std::vector<double> eps = cfg.get_double_list("sweep", "eps");
    const std::string event = cfg.get("sweep", "event");
    EventKind kind;
    double param = 0.0, tol = 0.0;
    if (event == "sup_exceed") {
        kind = EventKind::sup_exceed;
        param = cfg.get_double("sweep", "delta");
    } else if (event == "terminal_target") {
        kind = EventKind::terminal_target;
        param = cfg.get_double("sweep", "target");
        tol = cfg.get_double("sweep", "tol");
    } else {
        throw config_error("sweep.event must be sup_exceed or terminal_target");
    }
    const int restarts = static_cast<int>(cfg.get_long("sweep", "rate_restarts"));
    cfg.finish();

    const harness::SweepResult res =
        harness::run_eps_sweep(ex, eps, process == "particles", kind, param, tol, restarts);
    std::map<std::string, std::string> extra;
    extra["rate_value"] = harness::csv_escape_double(res.rate.value);
    extra["rate_converged"] = res.rate.converged ? "true" : "false";
    extra["rate_residual"] = harness::csv_escape_double(res.rate.residual);
    harness::write_outputs(resolve_out_dir(ex.out_dir), "sweep", res.csv, cfg, wall_since(t0),
                           extra);
    for (const auto& row : res.rows)
        std::cout << "eps=" << row.eps << " p_hat=" << row.p_hat << " eps_log_p=" << row.eps_log_p
                  << (row.resolved ? "" : " UNRESOLVED") << '\n';
    std::cout << "rate estimate: " << res.rate.value
              << (res.rate.converged ? "" : " (not converged)") << '\n';
    if (check) {
        bool all_resolved = false;
        const bool trend = harness::trend_strictly_increasing(res.rows, &all_resolved);
        if (!trend || !res.rate.converged) return 3;
    }
    return 0;
}

int run_equivalence(const std::string& config_path, int threads, bool check) {
    const auto t0 = std::chrono::steady_clock::now();
    Config cfg = Config::from_file(config_path);
    harness::Experiment ex = harness::experiment_from_config(cfg, true);
    ex.threads = threads;
    const std::vector<double> eps = cfg.get_double_list("equivalence", "eps");
    const double delta = cfg.get_double("equivalence", "delta");
    const std::vector<long> ns = cfg.get_long_list("equivalence", "n");
    const std::vector<double> Rs = cfg.get_double_list("equivalence", "R");
    cfg.finish();

    const harness::EquivalenceResult res = harness::run_equivalence_study(ex, eps, delta, ns, Rs);
    harness::write_outputs(resolve_out_dir(ex.out_dir), "equivalence", res.csv, cfg,
                           wall_since(t0), {});
    for (const auto& row : res.rows)
        std::cout << "eps=" << row.eps << " kind=" << row.gap_kind << " p_hat=" << row.p_hat
                  << (row.resolved ? "" : " UNRESOLVED") << '\n';
    if (check) {
        for (const auto& row : res.rows)
            if (row.gap_kind == "x_vs_y" && !row.resolved) return 3;
    }
    return 0;
}

int run_mn(const std::string& config_path, int threads, bool check) {
    const auto t0 = std::chrono::steady_clock::now();
    Config cfg = Config::from_file(config_path);
    harness::Experiment ex = harness::experiment_from_config(cfg, false);
    ex.threads = threads;
    const std::vector<long> ns = cfg.get_long_list("mn", "n");
    if (cfg.get("mn", "control") != "linear")
        throw config_error("mn.control: only 'linear' is available");
    cfg.finish();

    const harness::MnResult res = harness::run_mn_convergence(ex, ns);
    harness::write_outputs(resolve_out_dir(ex.out_dir), "mn_convergence", res.csv, cfg,
                           wall_since(t0), {});
    for (const auto& row : res.rows) std::cout << "n=" << row.n << " sup_gap=" << row.sup_gap << '\n';
    if (check) {
        // gap at 4n must be at most 0.7 of the gap at n wherever both exist
        for (const auto& row : res.rows)
            for (const auto& other : res.rows)
                if (other.n == 4 * row.n && row.sup_gap > 0.0 &&
                    other.sup_gap > 0.7 * row.sup_gap)
                    return 3;
    }
    return 0;
}

int run_rate(const std::string& config_path, int threads, bool check) {
    const auto t0 = std::chrono::steady_clock::now();
    Config cfg = Config::from_file(config_path);
    harness::Experiment ex = harness::experiment_from_config(cfg, false);
    ex.threads = threads;
    const std::string event = cfg.get("rate", "event");
    const int restarts = static_cast<int>(cfg.get_long("rate", "restarts"));
    double param = 0.0, tol = 0.0;
    EventKind kind;
    if (event == "sup_exceed") {
        kind = EventKind::sup_exceed;
        param = cfg.get_double("rate", "delta");
    } else if (event == "terminal_target") {
        kind = EventKind::terminal_target;
        param = cfg.get_double("rate", "target");
        tol = cfg.get_double("rate", "tol");
    } else {
        throw config_error("rate.event must be sup_exceed or terminal_target");
    }
    cfg.finish();

    const Segment xi = segment_at(ex.xi_path, 0.0);
    const PathGrid x0 = solve_limit_ode(ex.model, xi, ex.grid);
    const RareEvent ev = kind == EventKind::sup_exceed
                             ? RareEvent::sup_exceed(param, x0)
                             : RareEvent::terminal(Vec::Constant(ex.model.dim_d, param), tol);
    const RateEstimate est = rate_lower_bound_scan(ex.model, xi, x0, ev, restarts,
                                                   ex.master_seed, {}, threads);
    std::ostringstream csv;
    csv << "value,converged,iterations,residual\n"
        << harness::csv_escape_double(est.value) << ',' << (est.converged ? 1 : 0) << ','
        << est.iterations << ',' << harness::csv_escape_double(est.residual) << '\n';
    harness::write_outputs(resolve_out_dir(ex.out_dir), "rate", csv.str(), cfg, wall_since(t0),
                           {});
    std::cout << "rate value: " << est.value << " residual: " << est.residual
              << (est.converged ? "" : " (not converged)") << '\n';
    if (check && !est.converged) return 3;
    return 0;
}

int run_audit(const std::string& model_name, long trials, uint64_t seed, int threads,
              bool check) {
    const ModelSpec model = builtin_model(model_name);
    const SegmentSampler sampler(model.dim_d, 0.5, 1.0 / 16.0, 5.0, seed);
    const AuditReport rep = audit_assumptions(model, sampler, trials, threads);
    for (int c = 0; c < kAuditConditionCount; ++c)
        std::cout << audit_condition_name(static_cast<AuditCondition>(c)) << ": "
                  << (rep.passed[static_cast<size_t>(c)] ? "pass" : "FAIL")
                  << " (worst margin " << rep.worst_margin[static_cast<size_t>(c)] << ")\n";
    for (const auto& w : rep.witnesses) {
        std::cout << "witness " << audit_condition_name(w.condition) << " trial " << w.trial
                  << " lhs " << w.lhs << " rhs " << w.rhs << " xi = [";
        for (double v : w.xi_values) std::cout << ' ' << v;
        std::cout << " ]\n";
    }
    if (check && !rep.all_passed()) return 3;
    return 0;
}

int run_bounds(double alpha, double L, double L1, double T, double eps, double xi) {
    const PaperBounds b = compute_paper_bounds(alpha, L, L1, T, eps, xi);
    std::cout << "L2 = " << b.L2 << '\n'
              << "L3 = " << b.L3 << "  (log " << b.log_L3 << ")\n"
              << "X0_bound = " << b.X0_bound << "  (log " << b.log_X0_bound << ")\n"
              << "L4 = " << b.L4 << "  (log " << b.log_L4 << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neutral mean-field SDE laboratory"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (results do not depend on this)");

    std::string config_path;
    bool check = false;

    auto* sweep = app.add_subcommand("sweep", "epsilon sweep of a rare-event probability");
    sweep->add_option("--config", config_path)->required();
    sweep->add_flag("--check", check);

    auto* equiv = app.add_subcommand("equivalence", "paired-noise scheme gap tails");
    equiv->add_option("--config", config_path)->required();
    equiv->add_flag("--check", check);

    auto* mn = app.add_subcommand("mn-convergence", "discretized skeleton gap study");
    mn->add_option("--config", config_path)->required();
    mn->add_flag("--check", check);

    auto* rate = app.add_subcommand("rate", "action minimization for a rare event");
    rate->add_option("--config", config_path)->required();
    rate->add_flag("--check", check);

    std::string audit_model = "TEST-1";
    long audit_trials = 10000;
    uint64_t audit_seed = 1517998029;
    auto* audit = app.add_subcommand("audit", "sample-based assumption audit");
    audit->add_option("--model", audit_model);
    audit->add_option("--trials", audit_trials);
    audit->add_option("--seed", audit_seed);
    audit->add_flag("--check", check);

    double b_alpha = 0.25, b_L = 1.0, b_L1 = 1.0, b_T = 1.0, b_eps = 0.1, b_xi = 1.0;
    auto* bounds = app.add_subcommand("bounds", "closed-form bound calculator");
    bounds->add_option("--alpha", b_alpha)->required();
    bounds->add_option("--L", b_L)->required();
    bounds->add_option("--L1", b_L1)->required();
    bounds->add_option("--T", b_T)->required();
    bounds->add_option("--eps", b_eps)->required();
    bounds->add_option("--xi", b_xi)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sweep->parsed()) return run_sweep(config_path, threads, check);
        if (equiv->parsed()) return run_equivalence(config_path, threads, check);
        if (mn->parsed()) return run_mn(config_path, threads, check);
        if (rate->parsed()) return run_rate(config_path, threads, check);
        if (audit->parsed())
            return run_audit(audit_model, audit_trials, audit_seed, threads, check);
        if (bounds->parsed()) return run_bounds(b_alpha, b_L, b_L1, b_T, b_eps, b_xi);
    } catch (const nmv::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const nmv::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
