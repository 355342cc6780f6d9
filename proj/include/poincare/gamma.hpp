#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "poincare/common.hpp"
#include "poincare/matrix.hpp"
#include "poincare/model.hpp"
#include "poincare/space.hpp"

namespace poincare {

// Budget and seed for the nested Monte Carlo estimators: n_outer probe
// tuples from the normalized intensity, n_inner process replicates per
// tuple, n_mid secondary location probes where an inner lambda-integral is
// itself squared. Streams are derived so every (outer, inner) cell is
// independent and the result does not depend on evaluation order.
struct NestedMcPlan {
    long n_outer = 200;
    long n_inner = 200;
    long n_mid = 8;
    std::uint64_t seed = 1;
};

// One estimated bound ingredient. `plug_in` applies powers directly to inner
// means (biased O(1/n_inner), concave-power direction documented in the
// report); `debiased` is the jackknife-corrected variant. For square-rooted
// quantities `pre_clip` keeps the outer mean on the squared scale before
// clipping at zero; `unstable` flags a pre-clip mean below -3 outer s.e.
struct GammaEstimate {
    Estimate plug_in;
    double debiased = 0.0;
    double pre_clip = 0.0;
    bool unstable = false;
};

struct Gamma12 {
    GammaEstimate gamma1, gamma2;
};

struct CovarianceEstimate {
    Matrix cov;
    Matrix se;  // per-entry jackknife standard error
    long n = 0;
    std::uint64_t seed = 0;
    CovarianceEstimate() : cov(Matrix::identity(1)), se(Matrix::identity(1)) {}
    CovarianceEstimate(Matrix c, Matrix s, long nn, std::uint64_t sd)
        : cov(std::move(c)), se(std::move(s)), n(nn), seed(sd) {}
};

struct BigGammaReport {
    GammaEstimate gamma1, gamma2, gamma3, gamma4;
    double c = 0.0, p = 0.0;
};

struct GammaReport {
    GammaEstimate gamma1, gamma2, gamma3, gamma4, gamma5;
    CovarianceEstimate cov;
    Estimate cov_discrepancy;
    long n_outer = 0, n_inner = 0;
    std::uint64_t seed = 0;
};

// Sample covariance of n centered evaluations with per-entry jackknife s.e.
CovarianceEstimate estimate_covariance(const FunctionalModel& F, const CarrierSpace& carrier,
                                       const MarkSpace* marks, long n, std::uint64_t seed);

// Sum of |sigma_ij - cov_ij| with a root-sum-square error combination.
Estimate covariance_discrepancy(const Matrix& sigma, const CovarianceEstimate& cov);

// Sum over components of the integrated third absolute moment of the first
// difference (unbiased: no powers of inner means involved).
GammaEstimate estimate_gamma3(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const NestedMcPlan& plan);

// Triple-probe kernels mixing second and first differences (both estimates
// share probes and replicates).
Gamma12 estimate_gamma1_gamma2(const FunctionalModel& F, const CarrierSpace& carrier,
                               const MarkSpace* marks, const NestedMcPlan& plan);

// Fourth-moment ingredient over single and paired probes.
GammaEstimate estimate_gamma4(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const NestedMcPlan& plan);

// Sixth-moment ingredient; the support indicator uses the joint vector event
// max_i |second difference of F_i| > 1e-12.
GammaEstimate estimate_gamma5(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const NestedMcPlan& plan);

// Support-probability ingredients for marked models with (4+p)-th moment
// bound c. The fourth one needs p > 2.
BigGammaReport estimate_big_gammas(const FunctionalModel& F, const CarrierSpace& carrier,
                                   const MarkSpace* marks, double c, double p,
                                   const NestedMcPlan& plan);

// Per-component Dirichlet energy: integral of E (first difference)^2 against
// the intensity, for the first-order variance inequality.
std::vector<Estimate> estimate_dirichlet_energy(const FunctionalModel& F,
                                                const CarrierSpace& carrier,
                                                const MarkSpace* marks,
                                                const NestedMcPlan& plan);

// A scaled model family: scale -> (functional, carrier, marks).
struct ScaledModel {
    std::shared_ptr<const FunctionalModel> model;
    CarrierSpace carrier;
    std::optional<MarkSpace> marks;
    const MarkSpace* marks_ptr() const { return marks ? &*marks : nullptr; }
};
using ModelFamily = std::function<ScaledModel(double)>;

// Empirical check of the two uniform scaling assumptions: first and second
// differences bounded by a/sqrt(s), and the s-scaled integral (over the
// second probe) of the fourth-root support probability of second differences
// bounded by b uniformly in the first probe, per scale.
struct AssumptionScaleRow {
    double s = 0.0;
    double max_abs_d1 = 0.0;  // largest sampled |first difference of F_i|
    double max_abs_d2 = 0.0;  // largest sampled |second difference of F_i|
    double diff_threshold = 0.0;
    bool diff_pass = false;
    Estimate support_integral;  // worst sampled x: s * integral of P(D2 != 0)^{1/4}
    bool support_pass = false;
};
struct AssumptionReport {
    double a = 0.0, b = 0.0;
    std::vector<AssumptionScaleRow> rows;
    bool all_pass() const;
};
AssumptionReport check_scaling_assumptions(const ModelFamily& family,
                                           const std::vector<double>& scales, double a, double b,
                                           const NestedMcPlan& plan);

// Assembles every small-gamma ingredient plus the covariance block.
GammaReport full_gamma_report(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const GaussianTarget& target,
                              const NestedMcPlan& plan);

// CSV rows: term,value,std_error,n_outer,n_inner,seed.
void write_gamma_csv(std::ostream& os, const GammaReport& report);

}  // namespace poincare
