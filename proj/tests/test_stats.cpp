#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "philox.hpp"
#include "stats.hpp"

#include <cmath>
#include <vector>

using namespace jdlab;

TEST_CASE("line fit recovers a noiseless slope with zero se") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double xi : x) y.push_back(3.0 - 2.0 * xi);
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.0));
    CHECK(f.intercept == doctest::Approx(3.0));
    CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("normal cdf endpoints and symmetry") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_cdf(-3.0) + normal_cdf(3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ks test accepts its own null and rejects a wrong scale") {
    RandomStream s(derive_key(2024, 0), 0);
    std::vector<double> z(2000);
    for (auto& v : z) v = 1.7 * s.normal();
    CHECK(ks_test_normal(z, 1.7 * 1.7).p_value > 0.05);
    CHECK(ks_test_normal(z, 1.0).p_value < 1e-6);
}

TEST_CASE("batch means widen the naive se under positive correlation") {
    RandomStream s(derive_key(7, 7), 0);
    // AR(1) with strong correlation
    std::vector<double> x(20000);
    double prev = 0.0;
    for (auto& v : x) {
        prev = 0.95 * prev + s.normal();
        v = prev;
    }
    const double naive = std::sqrt(sample_variance(x) / x.size());
    CHECK(batch_means_se(x) > 2.0 * naive);
}

TEST_CASE("decay rate fit recovers a clean exponential") {
    std::vector<double> u, y;
    for (int i = 0; i < 20; ++i) {
        u.push_back(0.5 * i);
        y.push_back(3.0 * std::exp(-0.8 * 0.5 * i));
    }
    CHECK(fit_decay_rate(u, y) == doctest::Approx(0.8).epsilon(1e-10));
}
