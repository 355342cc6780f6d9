#include <cmath>
#include <vector>

#include "doctest.h"
#include "poincare/matrix.hpp"
#include "poincare/rng.hpp"
#include "poincare/sampler.hpp"
#include "poincare/space.hpp"

using namespace poincare;

TEST_CASE("homogeneous process has Poisson counts and uniform positions") {
    const double s = 30.0;
    const CarrierSpace carrier = CarrierSpace::unit_square(s);
    RngStream root(11);
    const int n = 20000;
    double count_sum = 0, count_sq = 0, pos_sum = 0;
    long points = 0;
    for (int r = 0; r < n; ++r) {
        RngStream rep = root.sub(static_cast<std::uint64_t>(r));
        const PointConfiguration eta = sample_poisson_process(carrier, nullptr, rep);
        const double k = static_cast<double>(eta.size());
        count_sum += k;
        count_sq += k * k;
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const double* x = eta.point(i);
            CHECK(carrier.contains(x));
            pos_sum += x[0];
            ++points;
        }
    }
    const double mean = count_sum / n;
    const double var = count_sq / n - mean * mean;
    CHECK(std::abs(mean - s) < 4.0 * std::sqrt(s / n));
    CHECK(var == doctest::Approx(s).epsilon(0.05));
    CHECK(pos_sum / static_cast<double>(points) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("density-weighted sampling concentrates mass where the density is") {
    // density(x) = 2x on [0,1]: P(X <= 1/2) = 1/4.
    const CarrierSpace carrier(1, {0, 0, 0}, {1, 0, 0}, 25.0,
                               [](const double* x) { return 2.0 * x[0]; }, 2.0, 1.0);
    RngStream root(13);
    long below = 0, total = 0;
    for (int r = 0; r < 8000; ++r) {
        RngStream rep = root.sub(static_cast<std::uint64_t>(r));
        const PointConfiguration eta = sample_poisson_process(carrier, nullptr, rep);
        for (std::size_t i = 0; i < eta.size(); ++i) {
            if (eta.point(i)[0] <= 0.5) ++below;
            ++total;
        }
    }
    CHECK(carrier.total_mass() == doctest::Approx(25.0));
    const double frac = static_cast<double>(below) / static_cast<double>(total);
    CHECK(std::abs(frac - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / static_cast<double>(total)));
}

TEST_CASE("marks ride along with every sampled point") {
    MarkSpace ms;
    ms.mark_dim = 2;
    ms.sampler = [](RngStream& rng, double* out) {
        out[0] = rng.next_uniform() < 0.5 ? -1.0 : 1.0;
        out[1] = rng.next_uniform(2.0, 3.0);
    };
    const CarrierSpace carrier = CarrierSpace::unit_interval(12.0);
    RngStream rep(3);
    const PointConfiguration eta = sample_poisson_process(carrier, &ms, rep);
    CHECK(eta.mark_dim() == 2);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double* mk = eta.mark(i);
        CHECK(std::abs(mk[0]) == 1.0);
        CHECK(mk[1] >= 2.0);
        CHECK(mk[1] < 3.0);
    }

    RngStream pr(4);
    const Probe p = sample_probe(carrier, &ms, pr);
    CHECK(carrier.contains(p.x.data()));
    CHECK(std::abs(p.mark[0]) == 1.0);
}

TEST_CASE("adding a point yields an extended copy and rejects outside points") {
    const CarrierSpace carrier = CarrierSpace::unit_interval(5.0);
    RngStream rep(8);
    const PointConfiguration eta = sample_poisson_process(carrier, nullptr, rep);
    const std::size_t before = eta.size();
    const double x[1] = {0.25};
    const PointConfiguration grown = add_point(carrier, eta, x, nullptr);
    CHECK(grown.size() == before + 1);
    CHECK(grown.point(grown.size() - 1)[0] == 0.25);
    CHECK(eta.size() == before);  // the input configuration is untouched
    const double outside[1] = {1.25};
    CHECK_THROWS_AS(add_point(carrier, eta, outside, nullptr), domain_error);
}

TEST_CASE("gaussian sampling reproduces the target covariance") {
    Matrix sigma(2);
    sigma(0, 0) = 2;
    sigma(0, 1) = 1;
    sigma(1, 0) = 1;
    sigma(1, 1) = 2;
    const GaussianTarget target(sigma);
    RngStream root(77);
    const int n = 50000;
    double s00 = 0, s01 = 0, s11 = 0, m0 = 0, m1 = 0;
    for (int r = 0; r < n; ++r) {
        RngStream rep = root.sub(static_cast<std::uint64_t>(r));
        const std::vector<double> z = sample_gaussian(target, rep);
        m0 += z[0];
        m1 += z[1];
        s00 += z[0] * z[0];
        s01 += z[0] * z[1];
        s11 += z[1] * z[1];
    }
    m0 /= n;
    m1 /= n;
    CHECK(std::abs(m0) < 4 * std::sqrt(2.0 / n));
    CHECK(std::abs(m1) < 4 * std::sqrt(2.0 / n));
    CHECK(s00 / n - m0 * m0 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(s01 / n - m0 * m1 == doctest::Approx(1.0).epsilon(0.10));
    CHECK(s11 / n - m1 * m1 == doctest::Approx(2.0).epsilon(0.05));
}
