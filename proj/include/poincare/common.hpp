#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace poincare {

// Scalar Monte Carlo estimate with its standard error and provenance.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_replicates = 0;
    std::uint64_t seed = 0;
};

// Thrown on contract violations (bad matrices, bad preconditions, ...).
class domain_error : public std::runtime_error {
  public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed configs / files; maps to exit code 2 in the CLI.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic pairwise summation (fixed reduction tree). Results do not
// depend on worker count because callers collect per-replicate values into
// index-addressed slots before reducing.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Mean / standard error of a replicate vector (pairwise sums throughout).
double mean_of(const std::vector<double>& v);
// Sample standard deviation / sqrt(n); 0 for n < 2.
double std_error_of(const std::vector<double>& v);

inline Estimate make_estimate(const std::vector<double>& replicates, std::uint64_t seed) {
    Estimate e;
    e.value = mean_of(replicates);
    e.std_error = std_error_of(replicates);
    e.n_replicates = static_cast<long>(replicates.size());
    e.seed = seed;
    return e;
}

// Standard normal density, CDF and quantile.
double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);  // inverse CDF, Wichura's AS241 double-precision variant

// Adaptive Simpson quadrature on [a,b]; used by quadrature oracles and the
// bivariate normal CDF. `tol` is an absolute error request.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

// P(X1 <= a, X2 <= b) for standard bivariate normal with correlation rho.
double binormal_cdf(double a, double b, double rho);

// Two-sided Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

// Shortest-round-trip decimal rendering used by every CSV writer so reruns
// are byte-identical.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace poincare
