#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poincare/common.hpp"
#include "poincare/matrix.hpp"
#include "poincare/testfunction.hpp"

namespace poincare {

// Row-major sample matrix: n draws of an m-vector.
struct SampleBlock {
    std::vector<double> data;
    long n = 0;
    int m = 0;
    const double* row(long i) const { return data.data() + static_cast<std::size_t>(i) * m; }
    void push_row(const std::vector<double>& x) {
        data.insert(data.end(), x.begin(), x.end());
        ++n;
    }
};

struct GaussProbPlan {
    long n_draws = 1000000;  // Monte Carlo fallback size
    std::uint64_t seed = 1;  // common random numbers across repeated calls
};

// P(N(0, Sigma) in region). Exact closed forms for one or two half-space
// constraints, balls in dimension 1, and axis boxes in dimension <= 2;
// everything else falls back to Monte Carlo with the plan's fixed seed, and
// the standard error reports which route was taken (0 means exact).
Estimate gaussian_region_prob(const TestFunction& region, const GaussianTarget& target,
                              const GaussProbPlan& plan = {});

// Fraction of sample rows inside the region.
double empirical_region_prob(const TestFunction& region, const SampleBlock& samples);

struct DistanceSearchPlan {
    int budget = 2000;      // multistart count for the half-space search
    int descent_cycles = 3;  // coordinate-descent sweeps per start
    int offset_grid = 64;    // candidate offsets scanned per sweep
    long n_reference = 100000;  // Gaussian reference table when no closed form applies
    std::uint64_t seed = 1;
    GaussProbPlan prob;  // final witness revaluation when Monte Carlo is needed
};

struct DistanceEstimate {
    double value = 0.0;
    double std_error = 0.0;  // binomial error at the witness plus any probability error
    std::optional<TestFunction> witness;
    std::string witness_text;
    long n_samples = 0;
    std::uint64_t seed = 0;
};

// Kolmogorov distance between a scalar sample and N(0, sd^2): exact sup of
// |ECDF - CDF| over the jump points.
DistanceEstimate estimate_dK(std::vector<double> values, double sd);

// Distance over indicators of intersections of l half-spaces, by multistart
// random directions plus coordinate descent on the offsets. The search is
// deterministic given the plan seed; ties keep the earliest start.
DistanceEstimate estimate_dHl(const SampleBlock& samples, const GaussianTarget& target, int l,
                              const DistanceSearchPlan& plan = {});

// Distance over indicators of convex sets, searched over a catalog of balls,
// axis boxes and half-space intersections with up to 2m faces. Passing the
// half-space witness from estimate_dHl guarantees the convex estimate
// dominates that half-space estimate on the same samples.
DistanceEstimate estimate_dconvex(const SampleBlock& samples, const GaussianTarget& target,
                                  const DistanceSearchPlan& plan = {},
                                  const TestFunction* include_witness = nullptr);

// |empirical - Gaussian| for a recorded witness on fresh or recorded samples.
DistanceEstimate replay_witness(const TestFunction& witness, const SampleBlock& samples,
                                const GaussianTarget& target, const GaussProbPlan& prob = {});

}  // namespace poincare
