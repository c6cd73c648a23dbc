#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "philox.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace jdlab;

TEST_CASE("blocks are pure functions of key and counter") {
    Philox g(0x1234abcdULL, 7);
    std::uint32_t a[4], b[4];
    g.block(42, a);
    g.block(42, b);
    for (int i = 0; i < 4; ++i) CHECK(a[i] == b[i]);

    // different counters and keys decorrelate
    g.block(43, b);
    int same = 0;
    for (int i = 0; i < 4; ++i) same += a[i] == b[i];
    CHECK(same < 4);
}

TEST_CASE("streams keyed by (seed, replication) do not collide") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t seed : {0ULL, 1ULL, 77ULL}) {
        for (std::uint64_t rep = 0; rep < 100; ++rep) keys.insert(derive_key(seed, rep));
    }
    CHECK(keys.size() == 300);
}

TEST_CASE("uniforms live strictly inside (0,1) and look uniform") {
    RandomStream s(derive_key(5, 0), 0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double m = sum / n;
    const double var = sum2 / n - m * m;
    CHECK(std::fabs(m - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::fabs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normals match the first two moments") {
    RandomStream s(derive_key(9, 3), 11);
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    CHECK(std::fabs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(sum2 / n - 1.0) < 0.02);
    CHECK(std::fabs(sum4 / n - 3.0) < 0.15);
}

TEST_CASE("poisson counts match the mean for small intensities") {
    const double mean_target = 0.02;
    double total = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        RandomStream s(derive_key(13, 0), static_cast<std::uint64_t>(i));
        total += s.poisson(mean_target);
    }
    const double m = total / n;
    const double se = std::sqrt(mean_target / n);
    CHECK(std::fabs(m - mean_target) < 5.0 * se);
}

TEST_CASE("per-step substreams are independent of consumption elsewhere") {
    // step 5's draws must not change when step 4 consumes a different count
    RandomStream a(derive_key(1, 1), 5);
    const double first = a.uniform();
    RandomStream b4(derive_key(1, 1), 4);
    for (int i = 0; i < 17; ++i) (void)b4.uniform();
    RandomStream a2(derive_key(1, 1), 5);
    CHECK(first == a2.uniform());
}
