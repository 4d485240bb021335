#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nmv/audit.hpp"
#include "nmv/builtin_models.hpp"

using namespace nmv;

namespace {

const SegmentSampler kSampler(1);

PathGrid path_with_sup(double target) {
    // alternating-sign ramp whose sup-norm is exactly `target`
    PathGrid p(kSampler.grid(), 1);
    const long d = kSampler.grid().delay_steps();
    for (long i = 0; i < kSampler.grid().node_count(); ++i) {
        const double f = static_cast<double>(i % (d + 1)) / static_cast<double>(d);
        p.set_node(i, Vec::Constant(1, (i % 2 == 0 ? 1.0 : -1.0) * f * target));
    }
    return p;
}

}  // namespace

TEST_CASE("chi_R piecewise values") {
    const double R = 2.0;
    CHECK(chi_R(segment_at(path_with_sup(2.0), 0.0), R) == doctest::Approx(1.0));
    CHECK(chi_R(segment_at(path_with_sup(1.0), 0.0), R) == doctest::Approx(1.0));
    CHECK(chi_R(segment_at(path_with_sup(2.5), 0.0), R) == doctest::Approx(0.5));
    CHECK(chi_R(segment_at(path_with_sup(4.0), 0.0), R) == doctest::Approx(0.0));
    CHECK(chi_R(segment_at(path_with_sup(3.0), 0.0), R) == doctest::Approx(0.0));
    CHECK_THROWS_AS(chi_R(segment_at(path_with_sup(1.0), 0.0), 0.0), config_error);
}

TEST_CASE("chi_R is 1-Lipschitz in the sup-norm") {
    for (int t = 0; t < 200; ++t) {
        const PathGrid a = kSampler.sample_path(static_cast<uint32_t>(t), 40);
        const PathGrid b = kSampler.sample_path(static_cast<uint32_t>(t), 41);
        const Segment sa = segment_at(a, 0.0), sb = segment_at(b, 0.0);
        const double gap = std::abs(chi_R(sa, 2.0) - chi_R(sb, 2.0));
        CHECK(gap <= sup_norm_diff(sa, sb) + 1e-12);
    }
}

TEST_CASE("builtin registry") {
    CHECK(builtin_model("SCHILDER").name == "SCHILDER");
    CHECK(builtin_model("TEST-1").alpha == doctest::Approx(0.25));
    CHECK(builtin_model("TEST-1-BOUNDED").L5.value() == doctest::Approx(4.0));
    CHECK_THROWS_AS(builtin_model("NOPE"), config_error);
}

TEST_CASE("L2 follows the max formula") {
    ModelSpec m = builtin_model("TEST-1");
    CHECK(m.L2() == doctest::Approx(std::max(m.L + 1.5625, m.L + m.L1)));
    m.L = 2.0;
    m.L1 = 5.0;
    CHECK(m.L2() == doctest::Approx(7.0));
    m.L1 = 0.1;
    CHECK(m.L2() == doctest::Approx(2.0 + 1.5625));
}

TEST_CASE("SCHILDER passes the audit") {
    const AuditReport rep = audit_assumptions(builtin_model("SCHILDER"), kSampler, 1000);
    CHECK(rep.all_passed());
    CHECK(rep.witnesses.empty());
}

TEST_CASE("TEST-1 passes the audit at 1e3 trials") {
    const AuditReport rep = audit_assumptions(builtin_model("TEST-1"), kSampler, 1000);
    for (int c = 0; c < kAuditConditionCount; ++c) {
        INFO(audit_condition_name(static_cast<AuditCondition>(c)),
             " margin ", rep.worst_margin[static_cast<size_t>(c)]);
        CHECK(rep.passed[static_cast<size_t>(c)]);
    }
}

TEST_CASE("zero model passes with slack") {
    ModelSpec z = builtin_model("SCHILDER");
    z.sigma = [](const Segment&, const EmpiricalLaw&) { return Mat::Zero(1, 1); };
    const AuditReport rep = audit_assumptions(z, kSampler, 500);
    CHECK(rep.all_passed());
    for (int c = 1; c < kAuditConditionCount; ++c)
        CHECK(rep.worst_margin[static_cast<size_t>(c)] > 0.0);
}

TEST_CASE("broken fixture fails A1 with a witness") {
    const AuditReport rep = audit_assumptions(broken_a1_fixture(), kSampler, 1000);
    CHECK_FALSE(rep.passed[0]);
    REQUIRE(!rep.witnesses.empty());
    const AuditWitness& w = rep.witnesses.front();
    CHECK(w.condition == AuditCondition::contraction);
    CHECK(w.trial >= 0);
    CHECK(w.lhs > w.rhs);
    CHECK(!w.xi_values.empty());
}

TEST_CASE("|D(xi)| <= alpha ||xi|| for the built-ins") {
    for (const char* name : {"SCHILDER", "TEST-1", "TEST-1-BOUNDED"}) {
        const ModelSpec m = builtin_model(name);
        for (int t = 0; t < 500; ++t) {
            const PathGrid p = kSampler.sample_path(static_cast<uint32_t>(t), 60);
            const Segment s = segment_at(p, 0.0);
            CHECK(m.D(s).norm() <= m.alpha * sup_norm(s) + 1e-12);
        }
    }
}

TEST_CASE("TEST-1-BOUNDED respects its clamp") {
    const ModelSpec m = builtin_model("TEST-1-BOUNDED");
    for (int t = 0; t < 10000; ++t) {
        const PathGrid p = kSampler.sample_path(static_cast<uint32_t>(t), 70);
        const PathGrid q = kSampler.sample_path(static_cast<uint32_t>(t), 71);
        const Segment s = segment_at(p, 0.0);
        const EmpiricalLaw mu = dirac_at(segment_at(q, 0.0));
        CHECK(m.b(s, mu).norm() <= 4.0);
        CHECK(m.sigma(s, mu).norm() <= 4.0);
    }
}

TEST_CASE("truncation") {
    const ModelSpec base = builtin_model("TEST-1");
    const double R = 2.0;
    const ModelSpec trunc = truncate(base, R);
    REQUIRE(trunc.L5.has_value());
    CHECK(trunc.L5.value() > 0.0);
    CHECK(trunc.alpha == base.alpha);

    SUBCASE("coincides with the base inside the ball") {
        const PathGrid p = path_with_sup(1.0);
        const PathGrid q = path_with_sup(0.5);
        const Segment s = segment_at(p, 0.0);
        const EmpiricalLaw mu = dirac_at(segment_at(q, 0.0));
        CHECK(trunc.b(s, mu)[0] == base.b(s, mu)[0]);
        CHECK(trunc.sigma(s, mu)(0, 0) == base.sigma(s, mu)(0, 0));
    }
    SUBCASE("vanishes outside radius R+1") {
        const PathGrid p = path_with_sup(3.5);
        const Segment s = segment_at(p, 0.0);
        const EmpiricalLaw mu = dirac_at(segment_at(path_with_sup(0.5), 0.0));
        CHECK(trunc.b(s, mu)[0] == 0.0);
        CHECK(trunc.sigma(s, mu)(0, 0) == 0.0);
    }
    SUBCASE("zero model stays zero") {
        ModelSpec z = builtin_model("SCHILDER");
        z.sigma = [](const Segment&, const EmpiricalLaw&) { return Mat::Zero(1, 1); };
        const ModelSpec zt = truncate(z, 1.0);
        const PathGrid p = path_with_sup(0.7);
        const Segment s = segment_at(p, 0.0);
        const EmpiricalLaw mu = dirac_at(s);
        CHECK(zt.b(s, mu).norm() == 0.0);
        CHECK(zt.sigma(s, mu).norm() == 0.0);
    }
    SUBCASE("truncated model still passes the audit") {
        const AuditReport rep = audit_assumptions(trunc, kSampler, 1000);
        for (int c = 0; c < kAuditConditionCount; ++c) {
            INFO(audit_condition_name(static_cast<AuditCondition>(c)),
                 " margin ", rep.worst_margin[static_cast<size_t>(c)]);
            CHECK(rep.passed[static_cast<size_t>(c)]);
        }
    }
}
