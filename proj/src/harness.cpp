#include "nmv/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "nmv/builtin_models.hpp"
#include "nmv/mc_stats.hpp"

namespace nmv::harness {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw config_error("config: empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw config_error("config: key before any [section]");
        if (key.empty() || value.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key or value");
        auto& sec = cfg.sections_[section];
        if (sec.count(key)) throw config_error("config: duplicate key " + section + "." + key);
        sec[key] = value;
    }
    return cfg;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) throw config_error("config: missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw config_error("config: missing key " + section + "." + key);
    ++reads_[section + "." + key];
    return k->second;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw config_error("config: " + section + "." + key + " is not a number: " + v);
    }
    if (pos != v.size())
        throw config_error("config: " + section + "." + key + " is not a number: " + v);
    return d;
}

long Config::get_long(const std::string& section, const std::string& key) const {
    const double d = get_double(section, key);
    const long l = std::lround(d);
    if (std::abs(d - static_cast<double>(l)) > 0.0)
        throw config_error("config: " + section + "." + key + " must be an integer");
    return l;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
    const std::string v = get(section, key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw config_error("config: bad list entry in " + section + "." + key);
        }
    }
    if (out.empty()) throw config_error("config: empty list " + section + "." + key);
    return out;
}

std::vector<long> Config::get_long_list(const std::string& section, const std::string& key) const {
    std::vector<long> out;
    for (double d : get_double_list(section, key)) {
        const long l = std::lround(d);
        if (std::abs(d - static_cast<double>(l)) > 0.0)
            throw config_error("config: " + section + "." + key + " must list integers");
        out.push_back(l);
    }
    return out;
}

void Config::finish() const {
    for (const auto& [sec, kv] : sections_)
        for (const auto& [key, value] : kv)
            if (!reads_.count(sec + "." + key))
                throw config_error("config: unknown key " + sec + "." + key);
}

Experiment experiment_from_config(const Config& cfg, bool need_particles) {
    const std::string model_name = cfg.get("model", "name");
    ModelSpec model = builtin_model(model_name);
    TimeGrid grid(cfg.get_double("grid", "tau"), cfg.get_double("grid", "T"),
                  cfg.get_double("grid", "h"));
    const std::string xi_text = cfg.get("model", "xi");
    PathGrid xi_path(grid, model.dim_d);
    if (xi_text.find(',') == std::string::npos) {
        const double c = std::stod(xi_text);
        xi_path = constant_initial_path(grid, Vec::Constant(model.dim_d, c));
    } else {
        if (model.dim_d != 1)
            throw config_error("config: node-list xi only supported for scalar models");
        std::stringstream ss(xi_text);
        std::string item;
        std::vector<double> vals;
        while (std::getline(ss, item, ',')) vals.push_back(std::stod(trim(item)));
        if (static_cast<long>(vals.size()) != grid.delay_steps() + 1)
            throw config_error("config: xi node list must have tau/h + 1 entries");
        for (long i = 0; i <= grid.delay_steps(); ++i)
            xi_path.set_node(i, Vec::Constant(1, vals[static_cast<size_t>(i)]));
    }
    Experiment ex{std::move(model), grid, std::move(xi_path),
                  static_cast<uint64_t>(cfg.get_long("noise", "master_seed")),
                  cfg.get_long("noise", "replicas"),
                  need_particles ? cfg.get_long("particles", "N") : 1,
                  cfg.get("output", "dir"),
                  0};
    if (ex.replicas < 1) throw config_error("config: replicas must be >= 1");
    if (need_particles && ex.particles < 1) throw config_error("config: N must be >= 1");
    return ex;
}

std::string csv_escape_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void require_strictly_decreasing(const std::vector<double>& eps) {
    for (size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1]))
            throw config_error("eps list must be strictly decreasing");
    for (double e : eps)
        if (e <= 0.0 || e > 1.0) throw config_error("eps values must be in (0, 1]");
}

struct TailCounter {
    long hits = 0;
    long replicas = 0;
};

SweepRow row_from_hits(double eps, long hits, long replicas) {
    SweepRow row;
    row.eps = eps;
    row.replicas = replicas;
    row.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
    const WilsonInterval ci = wilson_interval(hits, replicas);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.resolved = hits > 0;
    row.eps_log_p =
        row.resolved ? eps * std::log(row.p_hat) : std::numeric_limits<double>::quiet_NaN();
    return row;
}

}  // namespace

SweepResult run_eps_sweep(const Experiment& ex, const std::vector<double>& eps,
                          bool use_particles, EventKind kind, double delta_or_target,
                          double terminal_tol, int rate_restarts) {
    require_strictly_decreasing(eps);
    const Segment xi = segment_at(ex.xi_path, 0.0);
    const PathGrid x0 = solve_limit_ode(ex.model, xi, ex.grid);
    const RareEvent event =
        kind == EventKind::sup_exceed
            ? RareEvent::sup_exceed(delta_or_target, x0)
            : RareEvent::terminal(Vec::Constant(ex.model.dim_d, delta_or_target), terminal_tol);
    const NoiseBundle bundle{ex.master_seed};
    const int nt = ex.threads > 0 ? ex.threads : omp_get_max_threads();
    const LawTable ref_laws = dirac_table(x0);

    SweepResult result;
    for (double e : eps) {
        std::vector<char> hit(static_cast<size_t>(ex.replicas), 0);
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long r = 0; r < ex.replicas; ++r) {
            PathGrid path =
                use_particles
                    ? simulate_particles_serial(ex.model, xi, e, ex.particles, ex.grid, bundle,
                                                static_cast<uint32_t>(r))
                          .paths[0]
                    : simulate_frozen(ex.model, xi, e, bundle.stream(static_cast<uint32_t>(r), 0),
                                      x0, ref_laws);
            hit[static_cast<size_t>(r)] = event_occurs(event, path) ? 1 : 0;
        }
        long hits = 0;
        for (char c : hit) hits += c;
        result.rows.push_back(row_from_hits(e, hits, ex.replicas));
    }

    if (rate_restarts > 0) {
        result.rate = rate_lower_bound_scan(ex.model, xi, x0, event, rate_restarts,
                                            ex.master_seed, {}, ex.threads);
    } else {
        // companion estimate skipped (rate_restarts = 0)
        result.rate.value = std::numeric_limits<double>::quiet_NaN();
        result.rate.residual = std::numeric_limits<double>::quiet_NaN();
        result.rate.converged = false;
    }

    std::ostringstream csv;
    csv << "epsilon,p_hat,ci_lo,ci_hi,eps_log_p,replicas,resolved\n";
    for (const SweepRow& r : result.rows)
        csv << csv_escape_double(r.eps) << ',' << csv_escape_double(r.p_hat) << ','
            << csv_escape_double(r.ci_lo) << ',' << csv_escape_double(r.ci_hi) << ','
            << csv_escape_double(r.eps_log_p) << ',' << r.replicas << ','
            << (r.resolved ? 1 : 0) << '\n';
    result.csv = csv.str();
    return result;
}

EquivalenceResult run_equivalence_study(const Experiment& ex, const std::vector<double>& eps,
                                        double delta, const std::vector<long>& ns,
                                        const std::vector<double>& Rs) {
    require_strictly_decreasing(eps);
    if (!(delta > 0.0)) throw config_error("equivalence: delta must be positive");
    const Segment xi = segment_at(ex.xi_path, 0.0);
    const PathGrid x0 = solve_limit_ode(ex.model, xi, ex.grid);
    const NoiseBundle bundle{ex.master_seed};
    const int nt = ex.threads > 0 ? ex.threads : omp_get_max_threads();

    std::vector<ModelSpec> truncated;
    truncated.reserve(Rs.size());
    for (double R : Rs) truncated.push_back(truncate(ex.model, R));
    const LawTable ref_laws = dirac_table(x0);
    std::vector<LawTable> frozen_tables;
    frozen_tables.reserve(ns.size());
    for (long n : ns) frozen_tables.push_back(dirac_table_frozen(x0, n));

    const size_t kinds = 1 + ns.size() + Rs.size();
    EquivalenceResult result;
    for (double e : eps) {
        std::vector<char> hit(static_cast<size_t>(ex.replicas) * kinds, 0);
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long r = 0; r < ex.replicas; ++r) {
            const auto ur = static_cast<uint32_t>(r);
            const NoiseStream w0 = bundle.stream(ur, 0);
            const PathGrid y = simulate_frozen(ex.model, xi, e, w0, x0, ref_laws);
            char* slot = hit.data() + static_cast<size_t>(r) * kinds;
            // the designated particle shares stream (r, 0) with y
            const ParticleCloud cloud =
                simulate_particles_serial(ex.model, xi, e, ex.particles, ex.grid, bundle, ur);
            slot[0] = sup_gap(cloud.paths[0], y) > delta ? 1 : 0;
            size_t j = 1;
            for (size_t ni = 0; ni < ns.size(); ++ni) {
                const PathGrid yn = simulate_frozen_discretized(ex.model, xi, e, ns[ni], w0, x0,
                                                                ref_laws, frozen_tables[ni]);
                slot[j++] = sup_gap(y, yn) > delta ? 1 : 0;
            }
            for (const ModelSpec& tm : truncated) {
                const PathGrid yR = simulate_frozen(tm, xi, e, w0, x0, ref_laws);
                slot[j++] = sup_gap(y, yR) > delta ? 1 : 0;
            }
        }
        // reduce in replica order per kind
        std::vector<long> hits(kinds, 0);
        for (long r = 0; r < ex.replicas; ++r)
            for (size_t j = 0; j < kinds; ++j)
                hits[j] += hit[static_cast<size_t>(r) * kinds + j];
        size_t j = 0;
        auto push = [&](const std::string& kind_name) {
            const SweepRow base = row_from_hits(e, hits[j], ex.replicas);
            EquivalenceRow row;
            row.eps = e;
            row.delta = delta;
            row.gap_kind = kind_name;
            row.p_hat = base.p_hat;
            row.ci_lo = base.ci_lo;
            row.ci_hi = base.ci_hi;
            row.eps_log_p = base.eps_log_p;
            row.replicas = base.replicas;
            row.resolved = base.resolved;
            result.rows.push_back(std::move(row));
            ++j;
        };
        push("x_vs_y");
        for (long n : ns) push("y_vs_yn_" + std::to_string(n));
        for (double R : Rs) {
            std::ostringstream name;
            name << "y_vs_yR_" << csv_escape_double(R);
            push(name.str());
        }
    }

    std::ostringstream csv;
    csv << "epsilon,delta,gap_kind,p_hat,ci_lo,ci_hi,eps_log_p\n";
    for (const EquivalenceRow& r : result.rows)
        csv << csv_escape_double(r.eps) << ',' << csv_escape_double(r.delta) << ',' << r.gap_kind
            << ',' << csv_escape_double(r.p_hat) << ',' << csv_escape_double(r.ci_lo) << ','
            << csv_escape_double(r.ci_hi) << ',' << csv_escape_double(r.eps_log_p) << '\n';
    result.csv = csv.str();
    return result;
}

MnResult run_mn_convergence(const Experiment& ex, const std::vector<long>& ns) {
    const Segment xi = segment_at(ex.xi_path, 0.0);
    const PathGrid x0 = solve_limit_ode(ex.model, xi, ex.grid);
    const Control phi = linear_control(ex.grid.horizon(), ex.grid.step(), ex.model.dim_m);
    const PathGrid m = solve_skeleton(ex.model, xi, phi, x0);
    MnResult result;
    for (long n : ns) {
        const PathGrid mn = solve_skeleton_discretized(ex.model, xi, phi, n, x0);
        result.rows.push_back({n, sup_gap(m, mn)});
    }
    std::ostringstream csv;
    csv << "n,sup_gap\n";
    for (const MnRow& r : result.rows)
        csv << r.n << ',' << csv_escape_double(r.sup_gap) << '\n';
    result.csv = csv.str();
    return result;
}

bool trend_strictly_increasing(const std::vector<SweepRow>& rows, bool* all_resolved) {
    bool resolved = true;
    double prev = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const SweepRow& r : rows) {
        if (!r.resolved) {
            resolved = false;
            continue;
        }
        if (!(r.eps_log_p > prev)) ok = false;
        prev = r.eps_log_p;
    }
    if (all_resolved) *all_resolved = resolved;
    return ok && resolved;
}

void write_outputs(const std::string& out_dir, const std::string& study, const std::string& csv,
                   const Config& cfg, double wall_seconds,
                   const std::map<std::string, std::string>& extra) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / (study + ".csv"), std::ios::binary);
        f << csv;
    }
    nlohmann::json j;
    j["study"] = study;
    j["wall_clock_seconds"] = wall_seconds;
    for (const auto& [sec, kv] : cfg.sections())
        for (const auto& [k, v] : kv) j["config"][sec][k] = v;
    for (const auto& [k, v] : extra) j[k] = v;
    {
        std::string describe = "unknown";
        if (FILE* p = popen("git describe --always --dirty 2>/dev/null", "r")) {
            char buf[128];
            if (fgets(buf, sizeof buf, p)) {
                describe = trim(buf);
                if (!describe.empty() && describe.back() == '\n') describe.pop_back();
            }
            pclose(p);
        }
        j["git_describe"] = describe;
    }
    std::ofstream f(fs::path(out_dir) / (study + ".json"));
    f << j.dump(2) << '\n';
}

}  // namespace nmv::harness
