#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nmv/harness.hpp"
#include "nmv/mc_stats.hpp"

using namespace nmv;
using harness::Config;

namespace {

const char* kSweepConfig = R"(
# schilder exceedance sweep
[model]
name = SCHILDER
xi = 0.0
[grid]
tau = 0.25
T = 1.0
h = 0.015625
[noise]
master_seed = 42
replicas = 4000
[sweep]
process = frozen
event = sup_exceed
delta = 1.0
eps = 0.25,0.125
rate_restarts = 1
[output]
dir = out
)";

harness::Experiment sweep_experiment() {
    Config cfg = Config::from_string(kSweepConfig);
    harness::Experiment ex = harness::experiment_from_config(cfg, false);
    return ex;
}

}  // namespace

TEST_CASE("config parsing") {
    Config cfg = Config::from_string(kSweepConfig);
    CHECK(cfg.get("model", "name") == "SCHILDER");
    CHECK(cfg.get_double("grid", "tau") == doctest::Approx(0.25));
    CHECK(cfg.get_long("noise", "replicas") == 4000);
    const auto eps = cfg.get_double_list("sweep", "eps");
    REQUIRE(eps.size() == 2);
    CHECK(eps[0] == doctest::Approx(0.25));
    SUBCASE("missing keys are errors") {
        CHECK_THROWS_AS(cfg.get("grid", "nope"), config_error);
        CHECK_THROWS_AS(cfg.get("nosection", "x"), config_error);
    }
    SUBCASE("unread keys are rejected by finish") { CHECK_THROWS_AS(cfg.finish(), config_error); }
    SUBCASE("malformed text is rejected") {
        CHECK_THROWS_AS(Config::from_string("key = 1\n"), config_error);
        CHECK_THROWS_AS(Config::from_string("[s]\nkey\n"), config_error);
        CHECK_THROWS_AS(Config::from_string("[s]\nk = 1\nk = 2\n"), config_error);
    }
}

TEST_CASE("wilson interval sanity") {
    const WilsonInterval ci = wilson_interval(50, 100);
    CHECK(ci.lo == doctest::Approx(0.4038315).epsilon(1e-4));
    CHECK(ci.hi == doctest::Approx(0.5961685).epsilon(1e-4));
    const WilsonInterval zero = wilson_interval(0, 1000);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.005);
}

TEST_CASE("brownian sup tail series") {
    CHECK(brownian_sup_tail(1.0) == doctest::Approx(0.6292).epsilon(1e-3));
    CHECK(brownian_sup_tail(3.0) == doctest::Approx(0.0053996).epsilon(1e-4));
    CHECK(brownian_sup_tail(0.0) == 1.0);
    // scaling: sup |W| on [0,T] against a equals sup on [0,1] against a/sqrt(T)
    CHECK(brownian_sup_tail(2.0, 4.0) == doctest::Approx(brownian_sup_tail(1.0, 1.0)));
}

TEST_CASE("paper bounds calculator") {
    SUBCASE("L2 max formula") {
        const PaperBounds b = compute_paper_bounds(0.0, 0.5, 0.5, 1.0, 0.0, 1.0);
        CHECK(b.L2 == doctest::Approx(1.5));
    }
    SUBCASE("L3 display evaluated directly") {
        // with L2 = 1.5, T = 1, eps = 0, ||xi|| = 1:
        // ((3)*1 + 2*1.5) / 1 * exp(4*1.5) = 6 e^6
        const PaperBounds b = compute_paper_bounds(0.0, 0.5, 0.5, 1.0, 0.0, 1.0);
        CHECK(b.L3 == doctest::Approx(6.0 * std::exp(6.0)).epsilon(1e-12));
        // the display itself at L2 = 1: (3 + 2) e^4
        CHECK(5.0 * std::exp(4.0) == doctest::Approx(272.9907501657212).epsilon(1e-12));
    }
    SUBCASE("eps = 0 kills L4") {
        const PaperBounds b = compute_paper_bounds(0.25, 1.0, 1.0, 1.0, 0.0, 1.0);
        CHECK(b.L4 == 0.0);
    }
    SUBCASE("monotone in eps") {
        double l3 = 0.0, l4 = 0.0;
        for (double eps : {0.05, 0.1, 0.5}) {
            const PaperBounds b = compute_paper_bounds(0.25, 1.0, 1.0, 1.0, eps, 1.0);
            CHECK(b.log_L3 > l3);
            if (l4 != 0.0) CHECK(b.log_L4 > l4);
            l3 = b.log_L3;
            l4 = b.log_L4;
        }
    }
    SUBCASE("alpha domain") {
        CHECK_THROWS_AS(compute_paper_bounds(1.0, 1.0, 1.0, 1.0, 0.1, 1.0), config_error);
        CHECK_THROWS_AS(compute_paper_bounds(-0.1, 1.0, 1.0, 1.0, 0.1, 1.0), config_error);
    }
    SUBCASE("overflow is reported as inf with a finite log") {
        const PaperBounds b = compute_paper_bounds(0.25, 4.4, 0.6, 1.0, 0.5, 1.0);
        CHECK(std::isinf(b.L3));
        CHECK(std::isfinite(b.log_L3));
        CHECK(std::isinf(b.L4));
        CHECK(std::isfinite(b.log_L4));
    }
}

TEST_CASE("sweep rows, CSV shape and determinism") {
    harness::Experiment ex = sweep_experiment();
    ex.threads = 2;
    const harness::SweepResult a =
        harness::run_eps_sweep(ex, {0.25, 0.125}, false, EventKind::sup_exceed, 1.0, 0.0, 1);
    REQUIRE(a.rows.size() == 2);
    for (const auto& row : a.rows) {
        CHECK(row.p_hat >= 0.0);
        CHECK(row.p_hat <= 1.0);
        CHECK(row.ci_lo <= row.p_hat);
        CHECK(row.p_hat <= row.ci_hi);
        if (row.resolved) CHECK(row.eps_log_p <= 0.0);
    }
    CHECK(a.rate.converged);
    CHECK(std::abs(a.rate.value - 0.5) < 5e-3);
    CHECK(a.csv.substr(0, a.csv.find('\n')) ==
          "epsilon,p_hat,ci_lo,ci_hi,eps_log_p,replicas,resolved");

    ex.threads = 1;
    const harness::SweepResult b =
        harness::run_eps_sweep(ex, {0.25, 0.125}, false, EventKind::sup_exceed, 1.0, 0.0, 1);
    CHECK(a.csv == b.csv);  // bit-identical across worker counts
}

TEST_CASE("eps list validation") {
    harness::Experiment ex = sweep_experiment();
    CHECK_THROWS_AS(
        harness::run_eps_sweep(ex, {0.125, 0.25}, false, EventKind::sup_exceed, 1.0, 0.0, 1),
        config_error);
    CHECK_THROWS_AS(
        harness::run_eps_sweep(ex, {0.25, 0.25}, false, EventKind::sup_exceed, 1.0, 0.0, 1),
        config_error);
}

TEST_CASE("near-certain event gives eps log p near zero") {
    harness::Experiment ex = sweep_experiment();
    ex.replicas = 500;
    const harness::SweepResult res =
        harness::run_eps_sweep(ex, {0.25, 0.125}, false, EventKind::sup_exceed, 0.01, 0.0, 1);
    for (const auto& row : res.rows) {
        CHECK(row.resolved);
        CHECK(std::abs(row.eps_log_p) < 0.05);
    }
}

TEST_CASE("trend helper ignores nothing and demands full resolution") {
    std::vector<harness::SweepRow> rows(3);
    rows[0] = {0.25, 0.1, 0.0, 1.0, -0.6, 100, true};
    rows[1] = {0.125, 0.01, 0.0, 1.0, -0.58, 100, true};
    rows[2] = {0.0625, 0.001, 0.0, 1.0, -0.55, 100, true};
    bool all = false;
    CHECK(harness::trend_strictly_increasing(rows, &all));
    CHECK(all);
    rows[2].resolved = false;
    CHECK_FALSE(harness::trend_strictly_increasing(rows, &all));
    CHECK_FALSE(all);
    rows[2].resolved = true;
    rows[2].eps_log_p = -0.59;
    CHECK_FALSE(harness::trend_strictly_increasing(rows, &all));
}

TEST_CASE("equivalence study rows under shared noise") {
    Config cfg = Config::from_string(R"(
[model]
name = TEST-1
xi = 1.0
[grid]
tau = 0.25
T = 1.0
h = 0.015625
[noise]
master_seed = 7
replicas = 60
[particles]
N = 16
[output]
dir = out
)");
    harness::Experiment ex = harness::experiment_from_config(cfg, true);
    ex.threads = 2;
    const harness::EquivalenceResult res =
        harness::run_equivalence_study(ex, {0.4, 0.2}, 0.1, {8, 16}, {4.0});
    REQUIRE(res.rows.size() == 2 * 4);  // per eps: x_vs_y, two n's, one R
    for (const auto& row : res.rows) {
        CHECK(row.delta == 0.1);
        CHECK(row.p_hat <= 1.0);
    }
    // R = 4 truncation never activates for these paths
    for (const auto& row : res.rows)
        if (row.gap_kind.rfind("y_vs_yR", 0) == 0) CHECK(row.p_hat == 0.0);
    CHECK(res.csv.substr(0, res.csv.find('\n')) ==
          "epsilon,delta,gap_kind,p_hat,ci_lo,ci_hi,eps_log_p");
}

TEST_CASE("mn convergence study decays") {
    Config cfg = Config::from_string(R"(
[model]
name = TEST-1
xi = 1.0
[grid]
tau = 0.25
T = 1.0
h = 0.00390625
[noise]
master_seed = 7
replicas = 1
[output]
dir = out
)");
    harness::Experiment ex = harness::experiment_from_config(cfg, false);
    const harness::MnResult res = harness::run_mn_convergence(ex, {16, 64});
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[1].sup_gap < res.rows[0].sup_gap);
    CHECK(res.rows[1].sup_gap / res.rows[0].sup_gap <= 0.7);
}
