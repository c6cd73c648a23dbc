#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "model.hpp"

#include <cmath>
#include <limits>

using namespace jdlab;

TEST_CASE("catalogue models pass the grid audit") {
    for (const auto& id : catalogue_ids()) {
        const ModelSpec& m = catalogue(id);
        const AssumptionReport rep = audit_assumptions(m, AuditGrid{}, 1e-8);
        INFO("model ", id);
        for (const auto& item : rep.items) {
            INFO(item.name, ": ", item.detail);
            CHECK(item.pass);
        }
    }
}

TEST_CASE("audit report is deterministic") {
    const ModelSpec& m = catalogue("tanh_cpois_d1");
    const AssumptionReport a = audit_assumptions(m, AuditGrid{}, 1e-8);
    const AssumptionReport b = audit_assumptions(m, AuditGrid{}, 1e-8);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        CHECK(a.items[i].value == b.items[i].value);
        CHECK(a.items[i].detail == b.items[i].detail);
    }
}

TEST_CASE("repelling drift fails the inward-drift fit") {
    ModelSpec m = catalogue("tanh_cpois_d1");
    m.id = "repelling";
    m.drift = [](const double* x, double* out) { out[0] = x[0]; };
    const AssumptionReport rep = audit_assumptions(m, AuditGrid{}, 1e-8);
    const AuditItem* item = rep.find("A2.inward_drift");
    REQUIRE(item != nullptr);
    CHECK_FALSE(item->pass);
}

TEST_CASE("heavy-tailed marks fail the exponential moment audit") {
    ModelSpec m = catalogue("tanh_cpois_d1");
    m.id = "cauchy_marks";
    m.levy = LevyMeasure::compound_poisson_cauchy(1.0, 1.0, 1.0, 0.5);
    const AssumptionReport rep = audit_assumptions(m, AuditGrid{}, 1e-8);
    const AuditItem* item = rep.find("A4.exp_moment");
    REQUIRE(item != nullptr);
    CHECK_FALSE(item->pass);
    // activity index 1 demands symmetry, which Cauchy marks do satisfy
    const AuditItem* sym = rep.find("A5.symmetry");
    REQUIRE(sym != nullptr);
    CHECK(sym->pass);
}

TEST_CASE("non-finite coefficients are reported with the point") {
    ModelSpec m = catalogue("ou_d1");
    m.drift = [](const double* x, double* out) {
        out[0] = x[0] > 10.0 ? std::numeric_limits<double>::quiet_NaN() : -x[0];
    };
    CHECK_THROWS_WITH_AS(audit_assumptions(m, AuditGrid{}, 1e-8),
                         doctest::Contains("non-finite drift"), NumericError);
}

TEST_CASE("constant gate arithmetic: bound is 1/896") {
    // 2 * 16 * 28 = 896
    CHECK(check_c4_condition(1.0, 1.0, 0.001));
    CHECK_FALSE(check_c4_condition(1.0, 1.0, 0.002));
    CHECK_FALSE(check_c4_condition(1.0, 1.0, 1.0 / 896.0));
    CHECK(check_c4_condition(1.0, 1.0, 1.0 / 896.0 - 1e-9));
    CHECK_THROWS_AS(check_c4_condition(0.0, 1.0, 0.001), ValidationError);
    CHECK_THROWS_AS(check_c4_condition(1.0, -1.0, 0.001), ValidationError);
    CHECK_THROWS_AS(check_c4_condition(1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("lyapunov surrogate: exact outside, smooth and >= 1 inside") {
    const LyapunovSpec f = make_lyapunov(0.3);
    CHECK(f(1.0) == doctest::Approx(std::exp(0.3)).epsilon(1e-12));
    CHECK(f(-2.5) == doctest::Approx(std::exp(0.75)).epsilon(1e-12));
    for (int i = 0; i <= 100; ++i) {
        const double x = -1.0 + 0.02 * i;
        CHECK(f(x) >= 1.0);
    }
    // slope continuity at the seam
    const double h = 1e-5;
    const double inner = (f(1.0) - f(1.0 - h)) / h;
    const double outer = (f(1.0 + h) - f(1.0)) / h;
    CHECK(inner == doctest::Approx(outer).epsilon(1e-3));
}

TEST_CASE("unknown catalogue id raises") {
    CHECK_THROWS_AS(catalogue("nonexistent"), ValidationError);
}

TEST_CASE("levy declared constants are self-consistent") {
    const auto levy = LevyMeasure::compound_poisson_gauss(1, 1.0, {1.0, 1.0}, 0.5, 0.5);
    CHECK(levy.intensity() == 1.0);
    CHECK(levy.symmetric());
    CHECK(levy.mean_jump(0) == 0.0);
    CHECK(levy.exp_moment(0.5) <= levy.c4());
    CHECK(levy.exp_moment(0.5) > 1.0); // second moment is 1, the weight only adds

    const auto ts = LevyMeasure::tempered_stable(0.1, 0.5, 1.0, 0.4);
    CHECK_FALSE(ts.finite_activity());
    CHECK(std::isinf(ts.intensity()));
    CHECK(ts.residual_variance(0.1) > 0.0);
    CHECK(ts.residual_variance(0.01) < ts.residual_variance(0.1));
    CHECK_THROWS_AS(LevyMeasure::tempered_stable(0.1, 0.5, 1.0, 2.0), ValidationError);
}
