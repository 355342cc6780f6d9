#pragma once

#include <utility>
#include <vector>

#include "poincare/model.hpp"
#include "poincare/space.hpp"

namespace poincare {

// Batched first/second differences of one functional at one configuration.
// d1[i] belongs to probes[i]; d2[k] belongs to pair_index[k] (indices into
// the probe list; a pair (i,i) duplicates the atom).
struct DifferenceSample {
    std::vector<double> base_value;
    std::vector<std::vector<double>> d1;
    std::vector<std::vector<double>> d2;
    std::vector<std::pair<int, int>> pair_index;
};

// F(eta + delta_x) - F(eta); exactly two functional evaluations.
std::vector<double> diff1(const FunctionalModel& F, const PointConfiguration& eta,
                          const Probe& x);

// F(eta+d1+d2) - F(eta+d1) - F(eta+d2) + F(eta); symmetric in (x1, x2).
std::vector<double> diff2(const FunctionalModel& F, const PointConfiguration& eta,
                          const Probe& x1, const Probe& x2);

// Same semantics as repeated diff1/diff2 but shares the base and the
// single-augmentation evaluations: at most 1 + |probes| + |pairs| calls.
DifferenceSample diff_batch(const FunctionalModel& F, const PointConfiguration& eta,
                            const std::vector<Probe>& probes,
                            const std::vector<std::pair<int, int>>& pairs);

}  // namespace poincare
