#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "poincare/common.hpp"
#include "poincare/distance.hpp"
#include "poincare/matrix.hpp"
#include "poincare/testfunction.hpp"

namespace poincare {

// Shared draw tables and time grid for the interpolant solver.
struct QuadratureSpec {
    long n_draws = 4096;    // Gaussian draws shared across nodes and indices
    int n_nodes = 64;       // Gauss-Legendre nodes in log(1-s)
    double tail_cut = 1e-6; // time integral below (1-t)*tail_cut closed analytically
    std::uint64_t seed = 1;
};

// E h(sqrt(t) Z + sqrt(1-t) y) for Z ~ N(0, Sigma): the affinely transformed
// region stays in the test-function family, so this is a Gaussian region
// probability (exact whenever that one is).
Estimate smooth_h(const TestFunction& h, double t, const GaussianTarget& target,
                  const std::vector<double>& y, const GaussProbPlan& plan = {});

// Smoothed-indicator interpolant: f(y) = (1/2) int_t^1 (1-s)^{-1}
// [E h(sqrt(s) Z + sqrt(1-s) y) - E h(Z)] ds, with derivatives taken off the
// Gaussian kernel so only h itself is ever evaluated. One draw table serves
// every node and every index, and standard errors aggregate per draw, so
// correlation across nodes is accounted for exactly.
class SteinSolution {
  public:
    SteinSolution(const TestFunction& h, const GaussianTarget& target, double t,
                  const QuadratureSpec& spec = {});

    const TestFunction& h() const { return h_; }
    const GaussianTarget& target() const { return target_; }
    double t() const { return t_; }
    int m() const { return target_.m(); }
    // True when the smoothed expectations have closed forms, which makes
    // value() a deterministic quadrature.
    bool deterministic_value() const { return exact_; }
    // E h(Z), the subtracted constant of the characterizing equation.
    Estimate region_prob() const;

    Estimate value(const std::vector<double>& y) const;
    std::vector<Estimate> gradient(const std::vector<double>& y) const;  // m entries
    std::vector<Estimate> hessian(const std::vector<double>& y) const;   // m*m row-major
    std::vector<Estimate> third(const std::vector<double>& y) const;     // m*m*m row-major

    // h_t(y) - E h_t(N) - [<y, grad f(y)> - <Sigma, Hess f(y)>]; the Gaussian
    // expectation of the smoothed indicator collapses to E h(Z) exactly.
    Estimate residual(const std::vector<double>& y) const;

  private:
    struct Node {
        double s = 0.0, u = 0.0, weight = 0.0;  // u = 1-s; weight includes du
    };
    // H[k*(n_nodes+1)+i] = h(sqrt(s_i) z_k + sqrt(u_i) y); last column is the
    // analytic-tail node at u = u_min.
    void indicator_table(const std::vector<double>& y, std::vector<std::uint8_t>& H) const;
    void node_sums(const std::vector<std::uint8_t>& H, std::vector<double>& A,
                   std::vector<double>& B, std::vector<double>& C) const;

    TestFunction h_;
    GaussianTarget target_;
    double t_ = 0.0;
    QuadratureSpec spec_;
    std::vector<Node> nodes_;  // ascending u; one extra tail node at the end
    double u_min_ = 0.0;
    std::vector<double> z_;       // n_draws x m, rows are N(0, Sigma)
    std::vector<double> w_;       // n_draws x m, rows are Sigma^{-1} z
    std::vector<double> zeta2_;   // |zeta_k|^2 = w_k' Sigma w_k
    std::vector<std::uint8_t> base_in_;  // 1{z_k in region}
    Estimate p_region_;
    bool exact_ = false;
};

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// (1/4) sum_ij (int |d^2/dy_i dy_j phi_I|)^2 assembled from the 1-D blocks
// int |phi''| = 4 phi(1) and int |phi'| = 2 phi(0); always <= m^2.
double constant_M2(int m);

// int (sum_ijk (d^3 phi_I)^2)^{1/2} dz by importance sampling under phi_I:
// the density cancels, leaving Hermite-polynomial products; always <=
// sqrt(6) m^{3/2}.
Estimate constant_M3(int m, long n_draws = 200000, std::uint64_t seed = 1);

// E[(N^3 - 3N)^2] = 6, the one-dimensional block behind the cubic bound.
Estimate hermite3_second_moment(long n_draws = 200000, std::uint64_t seed = 1);

struct SteinCheckRow {
    std::string check;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double se = 0.0;
    bool pass = false;
};
void write_stein_csv(std::ostream& os, const std::vector<SteinCheckRow>& rows);

// Deterministic test-function catalogs for the checks below.
std::vector<TestFunction> random_halfspace_catalog(int m, int l, int count,
                                                   const GaussianTarget& target,
                                                   std::uint64_t seed);
std::vector<TestFunction> random_convex_catalog(int m, int count, const GaussianTarget& target,
                                                std::uint64_t seed);

// |interpolant residual| <= max(3 se, tol_abs) at one evaluation point.
SteinCheckRow check_residual(const SteinSolution& f, const std::vector<double>& y,
                             double tol_abs = 5e-3);

// Sup-norm bounds for the second and third derivatives:
// max_ij |f_ij| <= m^2 |Sigma^{-1}| |log t|,
// max_ijk |f_ijk| <= 6 m^3 |Sigma^{-1}|^{3/2} / sqrt(t),
// each checked at n_points Gaussian evaluation points.
std::vector<SteinCheckRow> check_derivative_sup_bounds(const TestFunction& h,
                                                       const GaussianTarget& target, double t,
                                                       int n_points,
                                                       const QuadratureSpec& spec = {});

// sup_h E sum_ij (f_ij(Y))^2 over the catalog against
// |Sigma^{-1}|^2 (M2 log^2(t) d_{H,2l}(Y,N) + 444 m^{23/6}).
SteinCheckRow check_second_derivative_catalog(const std::vector<TestFunction>& catalog,
                                              const SampleBlock& y_samples,
                                              const GaussianTarget& target, double t,
                                              double d_h2l, const QuadratureSpec& spec = {});

// Smoothing recovers the half-space distance:
// d_{Hl} <= 2 sup_h |E h_t(Y) - E h(N)| + (24 l sqrt(m)/sqrt(pi)) sqrt(t).
// The witness of the distance estimate should be part of the catalog.
SteinCheckRow check_halfspace_smoothing(const std::vector<TestFunction>& catalog,
                                        const SampleBlock& y_samples,
                                        const GaussianTarget& target, double t, int l,
                                        const DistanceEstimate& dhl,
                                        const GaussProbPlan& prob = {});

// Convex version on standardized samples (target N(0, I_m)):
// d_convex <= (4/3) sup_A |E h_t(Y) - E h(N)| + (20/sqrt(pi)) m^2 sqrt(t)/(1-t).
SteinCheckRow check_convex_smoothing(const std::vector<TestFunction>& catalog,
                                     const SampleBlock& std_samples, double t,
                                     const DistanceEstimate& dconvex,
                                     const GaussProbPlan& prob = {});

// Stripe bound sup_z P(|<u, N_I> - z| <= w) <= sqrt(2/pi) w; the centered
// stripe value 2 Phi(w) - 1 is exact.
std::vector<SteinCheckRow> check_gaussian_stripe_bound(const std::vector<double>& widths);

// Reciprocal boundary-distance moments over a catalog of convex sets:
// E d(N_I, boundary A)^{-alpha} <= 1 + 2 sqrt(2/pi) m^{3/2} alpha/(1-alpha).
std::vector<SteinCheckRow> check_boundary_proximity(int m, double alpha, long n_draws,
                                                    std::uint64_t seed);

// Each second derivative of the Gaussian density integrates to zero:
// E[w_i w_j - (Sigma^{-1})_ij] = 0 under N(0, Sigma), w = Sigma^{-1} z.
SteinCheckRow check_hessian_null_integral(const GaussianTarget& target, long n_draws,
                                          std::uint64_t seed);

// Conjugation: f_{t,h,Sigma}(y) = f_{t,h o S, I}(S^{-1} y) with S = Sigma^{1/2},
// checked on half-space regions where both sides are deterministic.
SteinCheckRow check_conjugation(const TestFunction& h, const GaussianTarget& target, double t,
                                const std::vector<double>& y, const QuadratureSpec& spec = {});

}  // namespace poincare
