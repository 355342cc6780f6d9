#include <cmath>
#include <vector>

#include "doctest.h"
#include "poincare/common.hpp"
#include "poincare/distance.hpp"
#include "poincare/matrix.hpp"
#include "poincare/rng.hpp"

using namespace poincare;

namespace {

GaussianTarget identity(int m) { return GaussianTarget(Matrix::identity(m)); }

GaussianTarget target2() {
    Matrix s(2);
    s(0, 0) = s(1, 1) = 2.0;
    s(0, 1) = s(1, 0) = 1.0;
    return GaussianTarget(s);
}

SampleBlock gaussian_block(const GaussianTarget& target, long n, std::uint64_t seed,
                           const std::vector<double>& mean = {}) {
    const int m = target.m();
    SampleBlock b;
    b.m = m;
    RngStream g(seed);
    const Matrix& S = target.sqrt();
    std::vector<double> z(m), x(m);
    for (long r = 0; r < n; ++r) {
        for (int j = 0; j < m; ++j) z[j] = g.next_normal();
        for (int i = 0; i < m; ++i) {
            double v = mean.empty() ? 0.0 : mean[i];
            for (int j = 0; j < m; ++j) v += S(i, j) * z[j];
            x[i] = v;
        }
        b.push_row(x);
    }
    return b;
}

}  // namespace

TEST_CASE("scalar Kolmogorov distance is the exact ECDF sup") {
    const DistanceEstimate d = estimate_dK({-1.0, 0.0, 1.0}, 1.0);
    // Jump points: the sup is attained approaching from the inside,
    // 1/3 - Phi(-1) = Phi(1) - 2/3.
    CHECK(d.value == doctest::Approx(1.0 / 3.0 - normal_cdf(-1.0)).epsilon(1e-14));
    CHECK(d.n_samples == 3);
    REQUIRE(d.witness.has_value());
    CHECK(d.witness->m() == 1);

    // Scale equivariance: dividing by sd standardizes.
    const DistanceEstimate d2 = estimate_dK({-2.0, 0.0, 2.0}, 2.0);
    CHECK(d2.value == doctest::Approx(d.value).epsilon(1e-14));

    CHECK_THROWS_AS(estimate_dK({}, 1.0), domain_error);
    CHECK_THROWS_AS(estimate_dK({0.0}, 0.0), domain_error);
}

TEST_CASE("single half-space search in dimension one matches the exact sup") {
    const GaussianTarget t1 = identity(1);
    const SampleBlock ys = gaussian_block(t1, 500, 17);
    const DistanceEstimate dk = estimate_dK(std::vector<double>(ys.data), 1.0);
    DistanceSearchPlan plan;
    plan.budget = 64;
    plan.seed = 5;
    const DistanceEstimate dh = estimate_dHl(ys, t1, 1, plan);
    CHECK(dh.value == doctest::Approx(dk.value).epsilon(1e-14));
    CHECK(dh.witness_text == dh.witness->serialize());
}

TEST_CASE("mean shift is detected at the known magnitude") {
    const GaussianTarget t1 = identity(1);
    // N(1, 1) vs N(0, 1): Kolmogorov distance 2 Phi(1/2) - 1.
    const SampleBlock ys = gaussian_block(t1, 20000, 99, {1.0});
    const double truth = 2.0 * normal_cdf(0.5) - 1.0;
    const DistanceEstimate dk = estimate_dK(std::vector<double>(ys.data), 1.0);
    CHECK(dk.value == doctest::Approx(truth).epsilon(0.05));
    CHECK(std::fabs(dk.value - truth) < 0.015);

    // Two dimensions: shift along (0.6, 0.8) with norm 0.8; the best single
    // half-space is orthogonal to the shift and the sup is 2 Phi(0.4) - 1.
    const GaussianTarget t2 = identity(2);
    const SampleBlock w = gaussian_block(t2, 20000, 101, {0.48, 0.64});
    DistanceSearchPlan plan;
    plan.budget = 500;
    plan.seed = 7;
    const DistanceEstimate dh = estimate_dHl(w, t2, 1, plan);
    const double truth2 = 2.0 * normal_cdf(0.4) - 1.0;
    CHECK(std::fabs(dh.value - truth2) < 0.025);
    REQUIRE(dh.witness.has_value());
    const auto& u = dh.witness->directions().front();
    CHECK(std::fabs(0.6 * u[0] + 0.8 * u[1]) > 0.95);
}

TEST_CASE("convex estimate dominates the half-space estimate on shared samples") {
    const GaussianTarget t2 = target2();
    for (std::uint64_t seed : {3u, 11u, 29u}) {
        const SampleBlock ys = gaussian_block(t2, 1500, seed);
        DistanceSearchPlan plan;
        plan.budget = 120;
        plan.seed = seed + 1;
        const DistanceEstimate dh = estimate_dHl(ys, t2, 2, plan);
        DistanceSearchPlan cplan;
        cplan.budget = 60;
        cplan.seed = seed + 2;
        const DistanceEstimate dc =
            estimate_dconvex(ys, t2, cplan, dh.witness ? &*dh.witness : nullptr);
        CHECK(dc.value >= dh.value);
    }
    DistanceSearchPlan tiny;
    tiny.budget = 3;
    CHECK_THROWS_AS(estimate_dconvex(gaussian_block(t2, 10, 1), t2, tiny), domain_error);
}

TEST_CASE("null calibration stays at the sampling-noise level") {
    const GaussianTarget t2 = identity(2);
    const SampleBlock ys = gaussian_block(t2, 2000, 201);
    DistanceSearchPlan plan;
    plan.budget = 200;
    plan.seed = 5;
    const DistanceEstimate dh = estimate_dHl(ys, t2, 1, plan);
    CHECK(dh.value < 0.06);
    CHECK(dh.value > 0.0);
    const DistanceEstimate dk =
        estimate_dK(gaussian_block(identity(1), 2000, 202).data, 1.0);
    CHECK(dk.value < 0.05);
}

TEST_CASE("positive rescaling leaves the half-space distance unchanged") {
    const GaussianTarget t2 = target2();
    const SampleBlock ys = gaussian_block(t2, 3000, 301, {0.3, -0.1});
    SampleBlock scaled;
    scaled.m = 2;
    scaled.n = ys.n;
    scaled.data.reserve(ys.data.size());
    for (double v : ys.data) scaled.data.push_back(2.0 * v);
    Matrix s4(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s4(i, j) = 4.0 * t2.sigma()(i, j);
    const GaussianTarget t4{s4};

    DistanceSearchPlan plan;
    plan.budget = 150;
    plan.seed = 13;
    const DistanceEstimate d1 = estimate_dHl(ys, t2, 1, plan);
    const DistanceEstimate d2 = estimate_dHl(scaled, t4, 1, plan);
    // Doubling is exact in floating point, so the whole search is equivariant.
    CHECK(d2.value == doctest::Approx(d1.value).epsilon(1e-12));
}

TEST_CASE("witness replay is bit-exact on the recorded samples") {
    const GaussianTarget t2 = target2();
    const SampleBlock ys = gaussian_block(t2, 1200, 401, {0.25, 0.0});
    DistanceSearchPlan plan;
    plan.budget = 100;
    plan.seed = 3;
    const DistanceEstimate dh = estimate_dHl(ys, t2, 2, plan);
    REQUIRE(dh.witness.has_value());
    const DistanceEstimate replayed = replay_witness(*dh.witness, ys, t2);
    CHECK(replayed.value == dh.value);

    // On fresh null samples the recorded witness sees only noise.
    const SampleBlock fresh = gaussian_block(t2, 5000, 999);
    const DistanceEstimate r2 = replay_witness(*dh.witness, fresh, t2);
    CHECK(r2.value < 0.06);
    CHECK(r2.std_error > 0.0);
}

TEST_CASE("gaussian region probabilities: exact routes against Monte Carlo") {
    const GaussianTarget t2 = target2();
    GaussProbPlan mc;
    mc.n_draws = 200000;
    mc.seed = 77;

    const TestFunction half = TestFunction::halfspaces({{0.6, 0.8}}, {0.5});
    const Estimate exact = gaussian_region_prob(half, t2);
    CHECK(exact.std_error == 0.0);
    // Projection variance u' Sigma u = 2.96.
    CHECK(exact.value == doctest::Approx(normal_cdf(0.5 / std::sqrt(2.96))).epsilon(1e-13));

    const TestFunction wedge = TestFunction::halfspaces({{1.0, 0.0}, {0.0, 1.0}}, {0.3, -0.2});
    const Estimate we = gaussian_region_prob(wedge, t2);
    CHECK(we.std_error == 0.0);

    // Independent Monte Carlo route for both exact values.
    const SampleBlock draws = gaussian_block(t2, 200000, 55);
    for (const auto* region : {&half, &wedge}) {
        const double freq = empirical_region_prob(*region, draws);
        const double p = gaussian_region_prob(*region, t2).value;
        const double se = std::sqrt(p * (1.0 - p) / draws.n);
        CHECK(std::fabs(freq - p) <= 4.0 * se);
    }

    // Interval in dimension one.
    const TestFunction interval = TestFunction::ball({0.3}, 0.5);
    const Estimate ie = gaussian_region_prob(interval, identity(1));
    CHECK(ie.std_error == 0.0);
    CHECK(ie.value == doctest::Approx(normal_cdf(0.8) - normal_cdf(-0.2)).epsilon(1e-13));

    // Three-dimensional box falls back to Monte Carlo.
    const TestFunction box3 =
        TestFunction::axis_box({-1.0, -1.0, -1.0}, {1.0, 0.5, 2.0});
    const Estimate b3 = gaussian_region_prob(box3, identity(3), mc);
    CHECK(b3.std_error > 0.0);
    const double truth = (2.0 * normal_cdf(1.0) - 1.0) *
                         (normal_cdf(0.5) - normal_cdf(-1.0)) *
                         (normal_cdf(2.0) - normal_cdf(-1.0));
    CHECK(std::fabs(b3.value - truth) <= 3.0 * b3.std_error);
    // Fixed seed: repeated evaluation is deterministic.
    CHECK(gaussian_region_prob(box3, identity(3), mc).value == b3.value);
}

TEST_CASE("empirical region probability counts rows") {
    SampleBlock b;
    b.m = 2;
    b.push_row({0.0, 0.0});
    b.push_row({2.0, 2.0});
    b.push_row({-1.0, 5.0});
    const TestFunction box = TestFunction::axis_box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(empirical_region_prob(box, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(empirical_region_prob(TestFunction::ball({0.0}, 1.0), b), domain_error);
}
