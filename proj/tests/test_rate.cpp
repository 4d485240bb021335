#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nmv/builtin_models.hpp"
#include "nmv/noise.hpp"
#include "nmv/rate.hpp"

using namespace nmv;

namespace {

const TimeGrid kGrid(0.25, 1.0, 1.0 / 64.0);

struct Setup {
    ModelSpec model;
    PathGrid xi;
    PathGrid x0;
};

Setup schilder_setup() {
    ModelSpec m = builtin_model("SCHILDER");
    PathGrid xi = constant_initial_path(kGrid, Vec::Constant(1, 0.0));
    PathGrid x0 = solve_limit_ode(m, segment_at(xi, 0.0), kGrid);
    return {std::move(m), std::move(xi), std::move(x0)};
}

}  // namespace

TEST_CASE("action closed forms") {
    SUBCASE("zero control") {
        const Control z(1.0, 1.0 / 64.0, 1);
        CHECK(action(z) == 0.0);
    }
    SUBCASE("straight line") {
        const Control l = linear_control(1.0, 1.0 / 64.0, 1);
        CHECK(action(l) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("tent: slope +1 then -1") {
        Control c(1.0, 1.0 / 64.0, 1);
        const double h = c.step();
        for (long k = 1; k <= c.cells(); ++k) {
            const double t = static_cast<double>(k) * h;
            c.set_node(k, Vec::Constant(1, t <= 0.5 ? t : 1.0 - t));
        }
        CHECK(action(c) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("action is quadratic and positive definite") {
    Control c(1.0, 1.0 / 32.0, 2);
    const NoiseStream s{8, 0, 0};
    for (long k = 1; k <= c.cells(); ++k) {
        Vec v(2);
        v << s.normal(static_cast<uint32_t>(k), 0), s.normal(static_cast<uint32_t>(k), 1);
        c.set_node(k, v);
    }
    const double base = action(c);
    CHECK(base > 0.0);
    Control scaled = c;
    for (long k = 1; k <= c.cells(); ++k) scaled.set_node(k, Vec(3.0 * c.node(k)));
    CHECK(action(scaled) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("control invariants") {
    Control c(1.0, 0.25, 1);
    CHECK(c.node(0)[0] == 0.0);
    CHECK_THROWS_AS(c.set_node(0, Vec::Constant(1, 1.0)), config_error);
    CHECK_THROWS_AS(Control(1.0, 0.3, 1), config_error);
}

TEST_CASE("event violation and occurrence") {
    const Setup s = schilder_setup();
    const RareEvent sup_ev = RareEvent::sup_exceed(1.0, s.x0);
    CHECK(event_violation(sup_ev, s.x0) == doctest::Approx(1.0));
    CHECK_FALSE(event_occurs(sup_ev, s.x0));
    const RareEvent term_ev = RareEvent::terminal(Vec::Constant(1, 0.0), 1e-6);
    CHECK(event_violation(term_ev, s.x0) == 0.0);
    CHECK(event_occurs(term_ev, s.x0));
    CHECK_THROWS_AS(RareEvent::sup_exceed(0.0, s.x0), config_error);
    CHECK_THROWS_AS(RareEvent::terminal(Vec::Constant(1, 0.0), 0.0), config_error);
}

TEST_CASE("SCHILDER terminal target reproduces |x*|^2 / 2T") {
    const Setup s = schilder_setup();
    for (double target : {0.5, 1.0, 2.0}) {
        const RareEvent ev = RareEvent::terminal(Vec::Constant(1, target), 1e-4);
        const Control init(1.0, kGrid.step(), 1);
        const RateEstimate est = minimize_rate(s.model, segment_at(s.xi, 0.0), s.x0, ev, init);
        CHECK(est.converged);
        CHECK(std::abs(est.value - target * target / 2.0) <= 1e-3);
    }
}

TEST_CASE("SCHILDER sup-exceed: cheapest exceedance is the straight line") {
    const Setup s = schilder_setup();
    const RareEvent ev = RareEvent::sup_exceed(1.0, s.x0);
    // nonzero start: the zero control is a symmetric saddle of the penalty
    const Control init = linear_control(1.0, kGrid.step(), 1, 0.1);
    const RateEstimate est = minimize_rate(s.model, segment_at(s.xi, 0.0), s.x0, ev, init);
    CHECK(est.converged);
    CHECK(est.residual <= 1e-5);
    CHECK(std::abs(est.value - 0.5) <= 1e-3);
    // argmin is close to the line phi(t) = t
    for (long k = 0; k <= est.argmin.cells(); ++k) {
        const double t = static_cast<double>(k) * kGrid.step();
        CHECK(std::abs(std::abs(est.argmin.node(k)[0]) - t) <= 0.05);
    }
}

TEST_CASE("zero control satisfies a target already on X0") {
    const Setup s = schilder_setup();
    const Vec end = s.x0.node(kGrid.node_count() - 1);
    const RareEvent ev = RareEvent::terminal(end, 1e-3);
    const Control init(1.0, kGrid.step(), 1);
    const RateEstimate est = minimize_rate(s.model, segment_at(s.xi, 0.0), s.x0, ev, init);
    CHECK(est.converged);
    CHECK(est.value <= 1e-10);
}

TEST_CASE("argmin satisfies the event predicate when converged") {
    const ModelSpec m = builtin_model("TEST-1");
    PathGrid xi = constant_initial_path(kGrid, Vec::Constant(1, 1.0));
    const PathGrid x0 = solve_limit_ode(m, segment_at(xi, 0.0), kGrid);
    const RareEvent ev = RareEvent::sup_exceed(0.3, x0);
    const Control init(1.0, kGrid.step(), 1);
    const RateEstimate est = minimize_rate(m, segment_at(xi, 0.0), x0, ev, init);
    CHECK(est.converged);
    const PathGrid path = solve_skeleton(m, segment_at(xi, 0.0), est.argmin, x0);
    CHECK(event_violation(ev, path) <= 1e-5);
    CHECK(est.value > 0.0);
}

TEST_CASE("rate monotone in the exceedance level") {
    const Setup s = schilder_setup();
    double prev = -1.0;
    for (double delta : {0.5, 1.0, 2.0}) {
        const RareEvent ev = RareEvent::sup_exceed(delta, s.x0);
        const RateEstimate est = rate_lower_bound_scan(s.model, segment_at(s.xi, 0.0), s.x0, ev,
                                                       2, 123);
        CHECK(est.converged);
        CHECK(std::abs(est.value - delta * delta / 2.0) <= 2e-3 * (1.0 + delta * delta));
        CHECK(est.value > prev);
        prev = est.value;
    }
}

TEST_CASE("restart scan never beats itself and restarts=1 is plain minimize") {
    const Setup s = schilder_setup();
    const RareEvent ev = RareEvent::sup_exceed(1.0, s.x0);
    const Control ramp = linear_control(1.0, kGrid.step(), 1);  // the scan's first start
    const RateEstimate single = minimize_rate(s.model, segment_at(s.xi, 0.0), s.x0, ev, ramp);
    const RateEstimate scan1 = rate_lower_bound_scan(s.model, segment_at(s.xi, 0.0), s.x0, ev, 1,
                                                     77);
    CHECK(scan1.value == single.value);
    double prev = std::numeric_limits<double>::infinity();
    for (int restarts : {1, 2, 4}) {
        const RateEstimate est = rate_lower_bound_scan(s.model, segment_at(s.xi, 0.0), s.x0, ev,
                                                       restarts, 77);
        CHECK(est.converged);
        CHECK(est.value <= prev + 1e-12);
        prev = est.value;
    }
}
