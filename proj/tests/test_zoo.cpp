#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "poincare/common.hpp"
#include "poincare/sampler.hpp"
#include "poincare/zoo.hpp"

using namespace poincare;

TEST_CASE("catalog lists the four models") {
    const auto& ids = zoo_ids();
    REQUIRE(ids.size() == 4);
    CHECK(std::count(ids.begin(), ids.end(), "compound_sum_rademacher") == 1);
    CHECK(std::count(ids.begin(), ids.end(), "wiener_ito_unit") == 1);
    CHECK(std::count(ids.begin(), ids.end(), "isolated_points") == 1);
    CHECK(std::count(ids.begin(), ids.end(), "boolean_disk") == 1);
    CHECK_THROWS_AS(make_zoo_model("no_such_model", 25.0), config_error);
}

TEST_CASE("compound sum: value is the scaled mark total") {
    const ZooEntry entry = make_zoo_model("compound_sum_rademacher", 25.0);
    CHECK(entry.model->m() == 1);
    CHECK_FALSE(entry.sigma_estimated);
    CHECK(entry.sigma.n() == 1);
    CHECK(entry.sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(entry.carrier.total_mass() == doctest::Approx(25.0).epsilon(1e-14));
    REQUIRE(entry.marks.has_value());
    CHECK(entry.marks->mark_dim == 1);

    RngStream rng(5);
    double signs = 0.0;
    long n_marks = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const PointConfiguration eta =
            sample_poisson_process(entry.carrier, entry.marks_ptr(), rng);
        double total = 0.0;
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const double mk = eta.mark(i)[0];
            CHECK(std::fabs(std::fabs(mk) - 1.0) < 1e-15);  // Rademacher
            total += mk;
            signs += mk;
            ++n_marks;
        }
        const double expected = total / 5.0;
        CHECK(entry.model->value(eta)[0] == doctest::Approx(expected).epsilon(1e-12));
    }
    // Sign balance: ~1250 marks, 4 sigma band.
    CHECK(std::fabs(signs) <= 4.0 * std::sqrt(static_cast<double>(n_marks)));
}

TEST_CASE("unit kernel integral: value is the centered scaled count") {
    const ZooEntry entry = make_zoo_model("wiener_ito_unit", 25.0);
    CHECK(entry.model->m() == 1);
    CHECK_FALSE(entry.sigma_estimated);
    CHECK(entry.marks_ptr() == nullptr);
    RngStream rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const PointConfiguration eta = sample_poisson_process(entry.carrier, nullptr, rng);
        const double expected = (static_cast<double>(eta.size()) - 25.0) / 5.0;
        CHECK(entry.model->value(eta)[0] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("isolated points: hand-built configurations") {
    const double s = 40.0;
    ZooParams params;
    params.theta = 1.0;
    params.calibration_n = 400;
    const ZooEntry entry = make_zoo_model("isolated_points", s, params);
    CHECK(entry.model->m() == 2);
    CHECK(entry.sigma_estimated);
    CHECK(entry.sigma.n() == 2);
    CHECK(entry.sigma(0, 1) == entry.sigma(1, 0));
    REQUIRE(entry.model->mean_vector().size() == 2);
    CHECK(entry.model->mean_vector()[0] > 0.0);

    const auto* iso = dynamic_cast<const IsolatedCountModel*>(entry.model.get());
    REQUIRE(iso != nullptr);
    CHECK(iso->radius() == doctest::Approx(std::sqrt(1.0 / s)).epsilon(1e-14));

    const double root = std::sqrt(s);
    PointConfiguration eta(2, 0);
    // Two close points (one pair) and one far point (isolated).
    const double a[2] = {0.10, 0.10}, b[2] = {0.10, 0.20}, c[2] = {0.80, 0.80};
    eta.push(a, nullptr);
    eta.push(b, nullptr);
    eta.push(c, nullptr);
    std::vector<double> v = entry.model->value(eta);
    CHECK(v[0] == doctest::Approx(1.0 / root).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(1.0 / root).epsilon(1e-12));

    // Tight triangle: no isolated points, three pairs.
    PointConfiguration tri(2, 0);
    const double p1[2] = {0.5, 0.5}, p2[2] = {0.55, 0.5}, p3[2] = {0.525, 0.54};
    tri.push(p1, nullptr);
    tri.push(p2, nullptr);
    tri.push(p3, nullptr);
    v = entry.model->value(tri);
    CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(3.0 / root).epsilon(1e-12));

    // Empty configuration maps to zero counts.
    PointConfiguration empty(2, 0);
    v = entry.model->value(empty);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);

    // Calibrated centering: the centered mean over fresh draws is near zero.
    RngStream rng(17);
    std::vector<double> mean0, mean1;
    for (int rep = 0; rep < 600; ++rep) {
        const PointConfiguration draw = sample_poisson_process(entry.carrier, nullptr, rng);
        const std::vector<double> cv = entry.model->centered(draw);
        mean0.push_back(cv[0]);
        mean1.push_back(cv[1]);
    }
    const Estimate e0 = make_estimate(mean0, 0), e1 = make_estimate(mean1, 0);
    // Calibration used 400 draws, so allow its own error on top of ours.
    CHECK(std::fabs(e0.value) <= 4.0 * (e0.std_error + entry.sigma(0, 0) / std::sqrt(400.0)));
    CHECK(std::fabs(e1.value) <= 4.0 * (e1.std_error + entry.sigma(1, 1) / std::sqrt(400.0)));
}

TEST_CASE("boolean disks: geometry wiring and single-grain value") {
    ZooParams params;
    params.boolean_intensity = 40.0;
    params.r_min = 0.05;
    params.r_max = 0.10;
    params.calibration_n = 300;
    const double s = 40.0;  // window side L = 1
    const ZooEntry entry = make_zoo_model("boolean_disk", s, params);
    CHECK(entry.model->m() == 3);
    CHECK(entry.sigma_estimated);
    REQUIRE(entry.marks.has_value());
    CHECK(entry.marks->mark_dim == 1);

    const auto* bd = dynamic_cast<const BooleanDiskModel*>(entry.model.get());
    REQUIRE(bd != nullptr);
    CHECK(bd->window() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bd->pixel() == doctest::Approx(0.005).epsilon(1e-14));
    // Carrier: r_max-dilated window at the grain intensity.
    CHECK(entry.carrier.lo(0) == doctest::Approx(-0.10).epsilon(1e-14));
    CHECK(entry.carrier.hi(0) == doctest::Approx(1.10).epsilon(1e-14));
    CHECK(entry.carrier.total_mass() == doctest::Approx(40.0 * 1.2 * 1.2).epsilon(1e-12));

    // Radius marks live in [r_min, r_max].
    RngStream rng(23);
    const PointConfiguration draw = sample_poisson_process(entry.carrier, entry.marks_ptr(), rng);
    for (std::size_t i = 0; i < draw.size(); ++i) {
        CHECK(draw.mark(i)[0] >= params.r_min);
        CHECK(draw.mark(i)[0] <= params.r_max);
    }

    // One grain well inside the window: intrinsic volumes of a single disk.
    PointConfiguration eta(2, 1);
    const double x[2] = {0.5, 0.5}, mk[1] = {0.08};
    eta.push(x, mk);
    CHECK(bd->disks_of(eta).size() == 1);
    CHECK(bd->disks_of(eta)[0].r == doctest::Approx(0.08));
    const std::vector<double> v = entry.model->value(eta);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(M_PI * 0.08).epsilon(0.03));
    CHECK(v[2] == doctest::Approx(M_PI * 0.08 * 0.08).epsilon(0.02));
}

TEST_CASE("boolean first difference is additive for far grains") {
    ZooParams params;
    params.calibration_n = 2;  // literal model use only; skip a real calibration
    const ZooEntry entry = make_zoo_model("boolean_disk", 40.0, params);
    const auto* bd = dynamic_cast<const BooleanDiskModel*>(entry.model.get());
    REQUIRE(bd != nullptr);

    PointConfiguration eta(2, 1);
    const double x[2] = {0.2, 0.2}, mk[1] = {0.06};
    eta.push(x, mk);
    const Disk grain{0.8, 0.8, 0.07};
    const IntrinsicVolumes d = boolean_diff1(*bd, eta, grain);
    CHECK(d.v0 == doctest::Approx(1.0));
    CHECK(d.v1 == doctest::Approx(M_PI * 0.07).epsilon(0.03));
    CHECK(d.v2 == doctest::Approx(M_PI * 0.07 * 0.07).epsilon(0.02));

    // Fully swallowed grain changes nothing.
    const Disk inside{0.2, 0.2, 0.01};
    const IntrinsicVolumes zero = boolean_diff1(*bd, eta, inside);
    CHECK(zero.v0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zero.v2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("local moment ratios are finite and anchored to the wills functional") {
    ZooParams params;
    params.calibration_n = 100;
    const ZooEntry entry = make_zoo_model("boolean_disk", 40.0, params);
    NestedMcPlan plan;
    plan.n_outer = 25;
    plan.n_inner = 20;
    plan.seed = 3;
    const LocalMomentReport rep = check_local_moment_bounds(entry, {3, 4, 6}, plan);
    REQUIRE(rep.rows.size() == 3);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].c_hat > 0.0);
        CHECK(rep.rows[i].c_hat < 1.0);  // a grain never beats its own wills functional
    }
    CHECK(rep.rows[0].order == 3);
    CHECK(rep.spread() >= 1.0);
    CHECK(rep.spread() < 10.0);
}
