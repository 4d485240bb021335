#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmv/bounds.hpp"
#include "nmv/rate.hpp"
#include "nmv/stochastic.hpp"

namespace nmv::harness {

/// Flat sectioned key-value config.  Every key an experiment needs must be
/// present, and keys nobody reads are rejected, so configs cannot silently
/// drift.  Solver tolerances are the one place defaults apply.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    std::string get(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long get_long(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<long> get_long_list(const std::string& section, const std::string& key) const;

    /// Throws config_error if any key was never read.
    void finish() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    mutable std::map<std::string, int> reads_;
};

struct SweepRow {
    double eps = 0.0;
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 1.0;
    double eps_log_p = 0.0;  // NaN when unresolved
    long replicas = 0;
    bool resolved = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    RateEstimate rate;
    std::string csv;
};

struct EquivalenceRow {
    double eps = 0.0;
    double delta = 0.0;
    std::string gap_kind;  // x_vs_y | y_vs_yn_<n> | y_vs_yR_<R>
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 1.0;
    double eps_log_p = 0.0;
    long replicas = 0;
    bool resolved = false;
};

struct EquivalenceResult {
    std::vector<EquivalenceRow> rows;
    std::string csv;
};

struct MnRow {
    long n = 0;
    double sup_gap = 0.0;
};

struct MnResult {
    std::vector<MnRow> rows;
    std::string csv;
};

/// Everything the studies need that is not study-specific.
struct Experiment {
    ModelSpec model;
    TimeGrid grid;
    PathGrid xi_path;   // carries xi on [-tau, 0]
    uint64_t master_seed = 0;
    long replicas = 0;
    long particles = 1;
    std::string out_dir;
    int threads = 0;
};

Experiment experiment_from_config(const Config& cfg, bool need_particles);

SweepResult run_eps_sweep(const Experiment& ex, const std::vector<double>& eps,
                          bool use_particles, EventKind kind, double delta_or_target,
                          double terminal_tol, int rate_restarts);

EquivalenceResult run_equivalence_study(const Experiment& ex, const std::vector<double>& eps,
                                        double delta, const std::vector<long>& ns,
                                        const std::vector<double>& Rs);

MnResult run_mn_convergence(const Experiment& ex, const std::vector<long>& ns);

/// Strictly-monotone trend over the resolved rows only; unresolved rows
/// never contribute.  `require_all_resolved` distinguishes "trend holds" from
/// "not enough data".
bool trend_strictly_increasing(const std::vector<SweepRow>& rows, bool* all_resolved);

std::string csv_escape_double(double v);

/// JSON run summary: config echo, git describe, wall clock.  The CSVs are
/// the bit-stable artifacts; the summary is allowed to carry timing.
void write_outputs(const std::string& out_dir, const std::string& study,
                   const std::string& csv, const Config& cfg, double wall_seconds,
                   const std::map<std::string, std::string>& extra);

}  // namespace nmv::harness
