#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "poincare/common.hpp"
#include "poincare/gamma.hpp"
#include "poincare/matrix.hpp"

namespace poincare {

// One ingredient of an assembled bound: the measured quantity, its MC
// standard error, and the constant multiplying it in the display.
struct BoundTerm {
    std::string name;
    double coefficient = 1.0;
    double value = 0.0;
    double std_error = 0.0;
    double contribution() const { return coefficient * value; }
};

// Assembled right-hand side of one normal-approximation bound. Additive
// displays sum coefficient * value over terms; max-form displays take
// prefactor * max(coefficient * value). The standard error propagates the
// ingredient errors to first order treating them as independent.
struct BoundReport {
    std::string display_id;
    std::string metric;  // d3 | d2 | dHl | dconvex | dK
    std::vector<BoundTerm> terms;
    bool max_form = false;
    double prefactor = 1.0;  // outside multiplier for max-form displays
    int argmax = -1;         // index of the selected term (max-form only)
    double total = 0.0;
    double std_error = 0.0;
    bool vacuous = false;  // total >= 1 while the metric is <= 1 by definition

    std::string text_block() const;  // human-readable rendering
};

// d3 bound: (m/2) discrepancy + m gamma1 + (m/2) gamma2 + (m^2/4) gamma3.
// Needs positive semi-definite sigma only.
BoundReport bound_d3(const GammaReport& gammas, const GaussianTarget& target, int m);

// d2 bound: |S^-1| |S|^{1/2} discrepancy + 2 |S^-1| |S|^{1/2} gamma1
// + |S^-1| |S|^{1/2} gamma2 + (sqrt(2 pi) m^2 / 8) |S^-1|^{3/2} |S| gamma3,
// with |.| the spectral norm. Needs positive definite sigma.
BoundReport bound_d2(const GammaReport& gammas, const GaussianTarget& target, int m);

// Half-space class bound: 718 m^{47/24} l |S^-1| *
// max{discrepancy, gamma1, gamma2, gamma4, sqrt(l) sqrt(gamma5) / |S^-1|^{1/4}}.
BoundReport bound_dHl(const GammaReport& gammas, const GaussianTarget& target, int m, int l);

// Convex class bound: 2304 m^3 |S^-1| * max of seven terms (discrepancy,
// gamma1, gamma2, gamma4, two terms in the uniform difference bound rho on
// a reference set of mass lambda_A, and the support-probability tail
// integral over the complement). rho must be a finite uniform bound on
// |D_x F_i|; pass tail_integral = 0 when the reference set is the whole
// carrier.
BoundReport bound_dconvex(const GammaReport& gammas, const GaussianTarget& target, int m,
                          double rho, double lambda_A, double tail_integral);

enum class BoundVariant { d3, d2, dHl, dconvex };

// Geometry inputs that only the convex-distance variant needs.
struct ConvexGeometry {
    double rho = 0.0;
    double lambda_A = 0.0;
    double tail_integral = 0.0;
};

// Marked-process bounds assembled from the support-probability ingredients:
// (d3)  (m/2) discrepancy + (3 m^{3/2}/2) G1 + (m^2/4) G2
// (d2)  |S^-1| |S|^{1/2} discrepancy + 3 |S^-1| |S| sqrt(m) G1
//       + (sqrt(2 pi)/8) |S^-1|^{3/2} |S| m^2 G2
// (dHl) 718 m^{65/24} l |S^-1| max{discrepancy, G1, G3, sqrt(l) sqrt(G4) / |S^-1|^{1/4}}
// (dconvex) 2304 m^5 |S^-1| max{discrepancy, G1, G3, geometry terms, tail}.
// The dHl and dconvex variants require p > 2 (already enforced upstream by
// the G4 estimator) and dconvex additionally needs the geometry block.
BoundReport bound_marked(const BigGammaReport& big, const GaussianTarget& target, int m, int l,
                         const Estimate& discrepancy, BoundVariant variant,
                         const ConvexGeometry& geometry = {});

// Moments of one i.i.d. increment vector for the compound-sum closed forms.
struct CompoundMoments {
    std::vector<double> abs3;  // E |X^(i)|^3 per component
    std::vector<double> mom4;  // E (X^(i))^4
    std::vector<double> mom6;  // E (X^(i))^6
    double a = 0.0;            // uniform bound |X^(i)| <= a (dconvex only)
};

// Closed-form compound-sum bounds at scale s:
// (d3)  (m^2/4) sum E|X|^3 / sqrt(s)
// (d2)  (sqrt(2 pi) m^2/8) |S^-1|^{3/2} |S| sum E|X|^3 / sqrt(s)
// (dHl) 718 m^{59/24} l^{3/2} max{|S^-1|, |S^-1|^{3/4}}
//         max{(sum E X^4)^{1/2}, (sum E X^6)^{1/4}} / sqrt(s)
// (dconvex) 15050 m^5 max{|S^-1|^{3/4}, |S^-1|^{3/2}} max{a^2, a^3} / sqrt(s).
BoundReport bound_compound(BoundVariant variant, const GaussianTarget& target, int m, double s,
                           const CompoundMoments& moments, int l = 1);

// Kernel integrals for the linear-functional closed forms.
struct FirstOrderIngredients {
    double discrepancy = 0.0;  // sum |sigma_ij - integral of f_i f_j|
    double int_abs3 = 0.0;     // sum integral |f_i|^3
    double int4 = 0.0;         // sum integral f_i^4
    double int6 = 0.0;         // sum integral f_i^6
    double rho = 0.0;          // sup |f_i| (dconvex only)
    double lambda_X = 0.0;     // total carrier mass (dconvex only)
};

// Closed-form bounds for vectors of first-order integrals, where second
// differences vanish identically:
// (d3)  (m/2) discrepancy + (m^2/4) int_abs3
// (d2)  |S^-1| |S|^{1/2} discrepancy + (sqrt(2 pi) m^2/8) |S^-1|^{3/2} |S| int_abs3
// (dHl) 718 m^{59/24} l^{3/2} max{|S^-1|, |S^-1|^{3/4}}
//         max{discrepancy, int4^{1/2}, int6^{1/4}}
// (dconvex) 15050 m^5 max{|S^-1|^{3/4}, |S^-1|^{3/2}}
//         max{discrepancy, rho^3 lambda_X, rho^2 sqrt(lambda_X)}.
BoundReport bound_first_order(BoundVariant variant, const GaussianTarget& target, int m,
                              const FirstOrderIngredients& ing, int l = 1);

// Least-squares slope of log(value) against log(scale) with a bootstrap
// confidence interval. With per-point standard errors the bootstrap is
// parametric (Gaussian on the log scale); otherwise residuals are resampled.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;  // fitted log-value at log-scale 0
    double ci_lo = 0.0, ci_hi = 0.0;
    long n_boot = 0;
};
RateFit rate_slope(const std::vector<std::pair<double, double>>& scale_value,
                   const std::vector<double>& std_errors = {}, long n_boot = 2000,
                   std::uint64_t seed = 1);

// Every hard-coded display constant, with the bound family it belongs to.
struct NamedConstant {
    std::string name;
    double value = 0.0;
    std::string used_in;
};
const std::vector<NamedConstant>& constants_table();

// CSV rows: display,metric,term,coefficient,value,std_error,total,vacuous
// (one row per term; total and vacuous repeat on every row of a report).
void write_bound_csv(std::ostream& os, const std::vector<BoundReport>& reports);

}  // namespace poincare
