#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "poincare/gamma.hpp"
#include "poincare/sampler.hpp"
#include "poincare/zoo.hpp"

using namespace poincare;

namespace {

// Point count: first difference identically 1, second difference identically
// 0, so every estimator below has a zero-variance closed form.
class CountModel final : public FunctionalModel {
  public:
    int m() const override { return 1; }
    std::string descriptor() const override { return "count"; }
    void evaluate(const PointConfiguration& eta, double* out) const override {
        out[0] = static_cast<double>(eta.size());
    }
};

class ConstantModel final : public FunctionalModel {
  public:
    int m() const override { return 1; }
    std::string descriptor() const override { return "constant"; }
    void evaluate(const PointConfiguration&, double* out) const override { out[0] = 3.5; }
};

bool close_to(const GammaEstimate& g, double target, double slack = 1e-9) {
    return std::abs(g.plug_in.value - target) <= 3.0 * g.plug_in.std_error + slack;
}

}  // namespace

TEST_CASE("count functional has zero-variance closed forms") {
    const CountModel F;
    const CarrierSpace carrier = CarrierSpace::unit_square(4.0);
    NestedMcPlan plan;
    plan.n_outer = 8;
    plan.n_inner = 8;
    plan.n_mid = 2;
    plan.seed = 5;

    const GammaEstimate g3 = estimate_gamma3(F, carrier, nullptr, plan);
    CHECK(g3.plug_in.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(g3.plug_in.std_error == doctest::Approx(0.0).epsilon(1e-12));

    const Gamma12 g12 = estimate_gamma1_gamma2(F, carrier, nullptr, plan);
    CHECK(g12.gamma1.plug_in.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g12.gamma2.plug_in.value == doctest::Approx(0.0).epsilon(1e-12));

    // With vanishing second differences only the single-probe blocks remain:
    // gamma4 = sqrt(m * mass), gamma5 = sqrt(m^2 * mass).
    const GammaEstimate g4 = estimate_gamma4(F, carrier, nullptr, plan);
    CHECK(g4.plug_in.value == doctest::Approx(2.0).epsilon(1e-12));
    const GammaEstimate g5 = estimate_gamma5(F, carrier, nullptr, plan);
    CHECK(g5.plug_in.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(g5.unstable);
}

TEST_CASE("support ingredients of the count functional are exact") {
    const CountModel F;
    const CarrierSpace carrier = CarrierSpace::unit_square(4.0);
    NestedMcPlan plan;
    plan.n_outer = 8;
    plan.n_inner = 8;
    plan.n_mid = 2;
    plan.seed = 5;

    SUBCASE("unit moment bound") {
        const BigGammaReport big = estimate_big_gammas(F, carrier, nullptr, 1.0, 4.0, plan);
        CHECK(big.gamma1.plug_in.value == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(big.gamma2.plug_in.value == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(big.gamma3.plug_in.value == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(big.gamma4.plug_in.value == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("the moment constant scales by its advertised power") {
        const double c = 2.0, p = 4.0;
        const BigGammaReport big = estimate_big_gammas(F, carrier, nullptr, c, p, plan);
        CHECK(big.gamma2.plug_in.value ==
              doctest::Approx(std::pow(c, 3.0 / (4.0 + p)) * 4.0).epsilon(1e-12));
        CHECK(big.gamma3.plug_in.value ==
              doctest::Approx(std::pow(c, 2.0 / (4.0 + p)) * 2.0).epsilon(1e-12));
    }
    SUBCASE("moment exponents at most 2 are rejected") {
        CHECK_THROWS_AS(estimate_big_gammas(F, carrier, nullptr, 1.0, 2.0, plan), domain_error);
        CHECK_THROWS_AS(estimate_big_gammas(F, carrier, nullptr, 1.0, -1.0, plan), domain_error);
    }
}

TEST_CASE("constant functional zeroes every ingredient") {
    const ConstantModel F;
    const CarrierSpace carrier = CarrierSpace::unit_interval(9.0);
    NestedMcPlan plan;
    plan.n_outer = 4;
    plan.n_inner = 4;
    plan.n_mid = 2;
    plan.seed = 2;
    CHECK(estimate_gamma3(F, carrier, nullptr, plan).plug_in.value == 0.0);
    CHECK(estimate_gamma4(F, carrier, nullptr, plan).plug_in.value == 0.0);
    CHECK(estimate_gamma5(F, carrier, nullptr, plan).plug_in.value == 0.0);
    const BigGammaReport big = estimate_big_gammas(F, carrier, nullptr, 1.0, 3.0, plan);
    CHECK(big.gamma1.plug_in.value == 0.0);
    CHECK(big.gamma2.plug_in.value == 0.0);
    CHECK(big.gamma3.plug_in.value == 0.0);
    CHECK(big.gamma4.plug_in.value == 0.0);
}

TEST_CASE("linear kernel functional matches its integral closed forms") {
    const double s = 25.0;
    const ZooEntry entry = make_zoo_model("wiener_ito_unit", s, ZooParams{});
    NestedMcPlan plan;
    plan.n_outer = 96;
    plan.n_inner = 48;
    plan.n_mid = 4;
    plan.seed = 11;

    const Gamma12 g12 =
        estimate_gamma1_gamma2(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    CHECK(g12.gamma1.plug_in.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g12.gamma2.plug_in.value == doctest::Approx(0.0).epsilon(1e-12));

    // s * integral of |f|^k is s^{1-k/2} for the unit-variance kernel.
    const GammaEstimate g3 =
        estimate_gamma3(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    CHECK(close_to(g3, std::pow(s, -0.5)));
    const GammaEstimate g4 =
        estimate_gamma4(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    CHECK(close_to(g4, std::pow(s, -0.5)));
    const GammaEstimate g5 =
        estimate_gamma5(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    CHECK(close_to(g5, 1.0 / s));
}

TEST_CASE("support-probability ingredients dominate the moment ingredients") {
    // For the unit-sign compound sum |DF| = s^{-1/2} exactly, so with the
    // sharp moment constant c = s^{-(4+p)/2} every domination
    //   gamma3 <= G2, gamma4 <= sqrt(m) G3, gamma5 <= m^{3/2} G4
    // holds with equality; check both sides stay within MC noise of the
    // common closed-form value.
    const double s = 25.0, p = 4.0;
    const double c = std::pow(s, -(4.0 + p) / 2.0);
    const ZooEntry entry = make_zoo_model("compound_sum_rademacher", s, ZooParams{});
    NestedMcPlan plan;
    plan.n_outer = 64;
    plan.n_inner = 48;
    plan.n_mid = 4;
    plan.seed = 23;

    const BigGammaReport big =
        estimate_big_gammas(*entry.model, entry.carrier, entry.marks_ptr(), c, p, plan);
    const GammaEstimate g3 =
        estimate_gamma3(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    const GammaEstimate g4 =
        estimate_gamma4(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    const GammaEstimate g5 =
        estimate_gamma5(*entry.model, entry.carrier, entry.marks_ptr(), plan);

    const double slack3 = 3.0 * (g3.plug_in.std_error + big.gamma2.plug_in.std_error) + 1e-9;
    CHECK(g3.plug_in.value <= big.gamma2.plug_in.value + slack3);
    CHECK(std::abs(g3.plug_in.value - std::pow(s, -0.5)) <= slack3);

    const double slack4 = 3.0 * (g4.plug_in.std_error + big.gamma3.plug_in.std_error) + 1e-9;
    CHECK(g4.plug_in.value <= big.gamma3.plug_in.value + slack4);

    const double slack5 = 3.0 * (g5.plug_in.std_error + big.gamma4.plug_in.std_error) + 1e-9;
    CHECK(g5.plug_in.value <= big.gamma4.plug_in.value + slack5);
}

TEST_CASE("covariance estimation recovers the unit-variance normalization") {
    const ZooEntry entry = make_zoo_model("compound_sum_rademacher", 50.0, ZooParams{});
    const CovarianceEstimate cov =
        estimate_covariance(*entry.model, entry.carrier, entry.marks_ptr(), 4000, 3);
    CHECK(std::abs(cov.cov(0, 0) - 1.0) < 4.0 * cov.se(0, 0));

    const Estimate disc = covariance_discrepancy(Matrix::identity(1), cov);
    CHECK(disc.value == doctest::Approx(std::abs(cov.cov(0, 0) - 1.0)));
}

TEST_CASE("dirichlet energy dominates the variance") {
    // First-order variance inequality with equality for linear functionals.
    const ZooEntry entry = make_zoo_model("wiener_ito_unit", 25.0, ZooParams{});
    NestedMcPlan plan;
    plan.n_outer = 200;
    plan.n_inner = 32;
    plan.n_mid = 2;
    plan.seed = 31;
    const std::vector<Estimate> energy =
        estimate_dirichlet_energy(*entry.model, entry.carrier, entry.marks_ptr(), plan);
    REQUIRE(energy.size() == 1);
    CHECK(std::abs(energy[0].value - 1.0) <= 3.0 * energy[0].std_error + 1e-9);

    RngStream root(101);
    const int n = 4000;
    double s1 = 0, s2 = 0;
    for (int r = 0; r < n; ++r) {
        RngStream rep = root.sub(static_cast<std::uint64_t>(r));
        const PointConfiguration eta =
            sample_poisson_process(entry.carrier, entry.marks_ptr(), rep);
        const double v = entry.model->value(eta)[0];
        s1 += v;
        s2 += v * v;
    }
    const double var = s2 / n - (s1 / n) * (s1 / n);
    const double var_se = var * std::sqrt(2.0 / n);  // Gaussian-scale heuristic
    CHECK(var <= energy[0].value + 3.0 * (var_se + energy[0].std_error) + 1e-9);
}

TEST_CASE("scaling assumptions hold for the compound family") {
    const ModelFamily family = [](double s) {
        const ZooEntry e = make_zoo_model("compound_sum_rademacher", s, ZooParams{});
        return ScaledModel{e.model, e.carrier, e.marks};
    };
    NestedMcPlan plan;
    plan.n_outer = 32;
    plan.n_inner = 16;
    plan.n_mid = 4;
    plan.seed = 7;
    const AssumptionReport report =
        check_scaling_assumptions(family, {25.0, 100.0}, 1.0, 1.0, plan);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.all_pass());
    for (const AssumptionScaleRow& row : report.rows) {
        CHECK(row.max_abs_d1 == doctest::Approx(1.0 / std::sqrt(row.s)).epsilon(1e-12));
        CHECK(row.max_abs_d2 == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("full report is deterministic and serializes with stable columns") {
    const ZooEntry entry = make_zoo_model("compound_sum_rademacher", 16.0, ZooParams{});
    const GaussianTarget target(entry.sigma);
    NestedMcPlan plan;
    plan.n_outer = 16;
    plan.n_inner = 16;
    plan.n_mid = 2;
    plan.seed = 77;
    const GammaReport a =
        full_gamma_report(*entry.model, entry.carrier, entry.marks_ptr(), target, plan);
    const GammaReport b =
        full_gamma_report(*entry.model, entry.carrier, entry.marks_ptr(), target, plan);
    CHECK(a.gamma1.plug_in.value == b.gamma1.plug_in.value);
    CHECK(a.gamma3.plug_in.value == b.gamma3.plug_in.value);
    CHECK(a.gamma5.debiased == b.gamma5.debiased);
    CHECK(a.cov_discrepancy.value == b.cov_discrepancy.value);

    std::ostringstream csv_a, csv_b;
    write_gamma_csv(csv_a, a);
    write_gamma_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());
    CHECK(csv_a.str().rfind("term,value,std_error,n_outer,n_inner,seed\n", 0) == 0);
}

TEST_CASE("outer replication shrinks the reported error") {
    const ZooEntry entry = make_zoo_model("isolated_points", 30.0, ZooParams{});
    NestedMcPlan small;
    small.n_outer = 24;
    small.n_inner = 24;
    small.n_mid = 2;
    small.seed = 5;
    NestedMcPlan big = small;
    big.n_outer = 96;
    const GammaEstimate a = estimate_gamma3(*entry.model, entry.carrier, entry.marks_ptr(), small);
    const GammaEstimate b = estimate_gamma3(*entry.model, entry.carrier, entry.marks_ptr(), big);
    CHECK(b.plug_in.std_error < a.plug_in.std_error);
    CHECK(b.plug_in.value > 0.0);
}
