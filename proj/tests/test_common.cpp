#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "poincare/common.hpp"

using namespace poincare;

TEST_CASE("normal cdf and quantile invert each other") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Classical table value at 1.96, correct to ~1e-15.
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-3));
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
        const double x = normal_quantile(p);
        CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-10));
    }
    for (double x : {-3.0, -0.5, 0.0, 1.25, 4.0}) {
        CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
        CHECK(normal_pdf(x) == doctest::Approx(std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI)));
    }
}

TEST_CASE("adaptive simpson integrates smooth functions to tight tolerance") {
    const double third = adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
    CHECK(third == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const double two = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(two == doctest::Approx(2.0).epsilon(1e-11));
    // A sharp but integrable peak still converges.
    const double peak = adaptive_simpson(
        [](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0, 1e-10, 60);
    CHECK(peak == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("bivariate normal cdf closed-form identities") {
    SUBCASE("independence factorizes") {
        for (double a : {-1.0, 0.3, 2.0})
            for (double b : {-0.7, 0.0, 1.5})
                CHECK(binormal_cdf(a, b, 0.0) ==
                      doctest::Approx(normal_cdf(a) * normal_cdf(b)).epsilon(1e-12));
    }
    SUBCASE("orthant probability follows the arcsine law") {
        for (double rho : {-0.9, -0.3, 0.25, 0.5, 0.95})
            CHECK(binormal_cdf(0.0, 0.0, rho) ==
                  doctest::Approx(0.25 + std::asin(rho) / (2 * M_PI)).epsilon(1e-12));
    }
    SUBCASE("perfect correlation reduces to the minimum") {
        CHECK(binormal_cdf(0.4, 1.1, 1.0) == doctest::Approx(normal_cdf(0.4)).epsilon(1e-14));
        CHECK(binormal_cdf(0.4, -1.1, -1.0) ==
              doctest::Approx(std::max(0.0, normal_cdf(0.4) + normal_cdf(-1.1) - 1.0)));
    }
    SUBCASE("splitting the second variable recovers the marginal") {
        for (double rho : {-0.99, -0.4, 0.0, 0.7, 0.999}) {
            const double total = binormal_cdf(0.8, 5.0, rho) +
                                 (normal_cdf(0.8) - binormal_cdf(0.8, 5.0, rho));
            CHECK(total == doctest::Approx(normal_cdf(0.8)).epsilon(1e-13));
            // P(X<=a) = P(X<=a, Y<=b) + P(X<=a, -Y<=-b) up to the null boundary.
            const double split = binormal_cdf(0.8, 0.3, rho) + binormal_cdf(0.8, -0.3, -rho);
            CHECK(split == doctest::Approx(normal_cdf(0.8)).epsilon(1e-11));
        }
    }
    SUBCASE("monotone in each argument") {
        CHECK(binormal_cdf(0.0, 0.5, 0.6) < binormal_cdf(0.4, 0.5, 0.6));
        CHECK(binormal_cdf(0.4, 0.1, 0.6) < binormal_cdf(0.4, 0.5, 0.6));
    }
}

TEST_CASE("pairwise sum is order-stable and accurate on adversarial data") {
    // 1 + many tiny terms: naive left-to-right accumulation loses them.
    std::vector<double> data(1 << 16, 1e-16);
    data.front() = 1.0;
    const double sum = pairwise_sum(data);
    CHECK(sum == doctest::Approx(1.0 + (data.size() - 1) * 1e-16).epsilon(1e-14));

    std::vector<double> alt;
    for (int i = 0; i < 1001; ++i) alt.push_back(i % 2 == 0 ? 1e8 : -1e8);
    CHECK(pairwise_sum(alt) == doctest::Approx(1e8));
}

TEST_CASE("estimate aggregation reports the standard error of the mean") {
    std::vector<double> reps{1.0, 2.0, 3.0, 4.0};
    const Estimate e = make_estimate(reps, 7);
    CHECK(e.value == doctest::Approx(2.5));
    // sd = sqrt(5/3), se = sd / 2
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
    CHECK(e.n_replicates == 4);
    CHECK(e.seed == 7);
}

TEST_CASE("kolmogorov tail is a decreasing probability") {
    const double a = kolmogorov_tail(0.5);
    const double b = kolmogorov_tail(1.0);
    const double c = kolmogorov_tail(2.0);
    CHECK(a > b);
    CHECK(b > c);
    CHECK(a <= 1.0);
    CHECK(c >= 0.0);
    // The 5% critical point of the asymptotic distribution sits near 1.358.
    CHECK(kolmogorov_tail(1.358) == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.718281828459045}) {
        const std::string s = fmt_g17(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}
