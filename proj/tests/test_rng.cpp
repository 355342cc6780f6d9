#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "poincare/rng.hpp"

using namespace poincare;

TEST_CASE("streams are pure functions of seed and path") {
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c = RngStream(42).sub(3, 9);
    RngStream d = RngStream(42).sub(3, 9);
    CHECK(c.next_normal() == d.next_normal());
    CHECK(c.next_poisson(4.2) == d.next_poisson(4.2));

    // Drawing from one substream never perturbs a sibling.
    RngStream parent(42);
    RngStream s1 = parent.sub(1);
    const double first = RngStream(42).sub(2).next_uniform();
    for (int i = 0; i < 100; ++i) s1.next_u64();
    CHECK(parent.sub(2).next_uniform() == first);
}

TEST_CASE("distinct stream paths decorrelate") {
    RngStream a = RngStream(7).sub(1);
    RngStream b = RngStream(7).sub(2);
    const int n = 20000;
    double sum_ab = 0, sum_a = 0, sum_b = 0, sum_a2 = 0, sum_b2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = a.next_uniform(), y = b.next_uniform();
        sum_a += x;
        sum_b += y;
        sum_ab += x * y;
        sum_a2 += x * x;
        sum_b2 += y * y;
    }
    const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
    const double va = sum_a2 / n - (sum_a / n) * (sum_a / n);
    const double vb = sum_b2 / n - (sum_b / n) * (sum_b / n);
    const double corr = cov / std::sqrt(va * vb);
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform moments match U(0,1)") {
    RngStream g(123);
    const int n = 100000;
    double s1 = 0, s2 = 0;
    double lo = 1, hi = 0;
    for (int i = 0; i < n; ++i) {
        const double u = g.next_uniform();
        s1 += u;
        s2 += u * u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(4.0 / std::sqrt(12.0 * n)));
    CHECK(var == doctest::Approx(1.0 / 12).epsilon(0.02));
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);

    RngStream h(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = h.next_uniform_open();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    RngStream r(6);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.next_uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
    }
}

TEST_CASE("normal draws have Gaussian moments") {
    RngStream g(99);
    const int n = 200000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = g.next_normal();
        s1 += z;
        s2 += z * z;
        s3 += z * z * z;
        s4 += z * z * z * z;
    }
    const double inv = 1.0 / n;
    // s.e. of the k-th moment estimate is sqrt(Var(Z^k)/n).
    CHECK(std::abs(s1 * inv) < 4.0 * std::sqrt(1.0 * inv));
    CHECK(std::abs(s2 * inv - 1.0) < 4.0 * std::sqrt(2.0 * inv));
    CHECK(std::abs(s3 * inv) < 4.0 * std::sqrt(15.0 * inv));
    CHECK(std::abs(s4 * inv - 3.0) < 4.0 * std::sqrt(96.0 * inv));
}

TEST_CASE("poisson counts match mean and variance") {
    RngStream g(2024);
    for (double lambda : {0.3, 3.7, 40.0}) {
        const int n = 50000;
        double s1 = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(g.next_poisson(lambda));
            s1 += k;
            s2 += k * k;
        }
        const double mean = s1 / n;
        const double var = s2 / n - mean * mean;
        const double se_mean = std::sqrt(lambda / n);
        CHECK(std::abs(mean - lambda) < 4.0 * se_mean);
        CHECK(var == doctest::Approx(lambda).epsilon(0.05));
    }
    RngStream z(1);
    CHECK(z.next_poisson(0.0) == 0);
}

TEST_CASE("bounded draws stay in range and spread evenly") {
    RngStream g(31337);
    std::vector<long> counts(10, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t k = g.next_below(10);
        REQUIRE(k < 10);
        ++counts[static_cast<std::size_t>(k)];
    }
    for (long c : counts) {
        // Binomial s.e. of each cell count is ~95; allow 5 s.e.
        CHECK(std::abs(c - n / 10) < 5 * std::sqrt(n * 0.1 * 0.9));
    }
}
