#pragma once

#include <vector>

#include "poincare/matrix.hpp"
#include "poincare/rng.hpp"
#include "poincare/space.hpp"

namespace poincare {

// Draws a configuration with Poisson(total mass) points, locations i.i.d.
// proportional to the carrier density (rejection against its sup bound),
// marks i.i.d. from `marks` when given.
PointConfiguration sample_poisson_process(const CarrierSpace& carrier, const MarkSpace* marks,
                                          RngStream& rng);

// One location (plus mark) from the normalized intensity; used both for
// process points and for probe points in lambda-integrals.
Probe sample_probe(const CarrierSpace& carrier, const MarkSpace* marks, RngStream& rng);

// Sigma^{1/2} z with z i.i.d. standard normal.
std::vector<double> sample_gaussian(const GaussianTarget& target, RngStream& rng);

// Copy of `config` with one extra point; the location must lie in the box.
PointConfiguration add_point(const CarrierSpace& carrier, const PointConfiguration& config,
                             const double* x, const double* mark);

}  // namespace poincare
