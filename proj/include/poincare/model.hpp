#pragma once

#include <memory>
#include <string>
#include <vector>

#include "poincare/common.hpp"
#include "poincare/space.hpp"

namespace poincare {

// A vector-valued functional F : configurations -> R^m. Implementations must
// be deterministic functions of the configuration (all randomness lives in
// the sampled configuration and marks).
class FunctionalModel {
  public:
    virtual ~FunctionalModel() = default;

    virtual int m() const = 0;
    virtual std::string descriptor() const = 0;
    virtual void evaluate(const PointConfiguration& eta, double* out) const = 0;

    // Fast path for F(eta u {extras}); the default literally appends and
    // re-evaluates. Overrides must match it to numerical noise.
    virtual void evaluate_augmented(const PointConfiguration& eta, const Probe* extras,
                                    int n_extras, double* out) const;

    std::vector<double> value(const PointConfiguration& eta) const;
    // value(eta) - mean_vector(); the mean defaults to zero until set.
    std::vector<double> centered(const PointConfiguration& eta) const;

    const std::vector<double>& mean_vector() const;
    void set_mean_vector(std::vector<double> mu);

  private:
    mutable std::vector<double> mean_;  // lazily sized to m()
};

}  // namespace poincare
