#include "poincare/model.hpp"

namespace poincare {

void FunctionalModel::evaluate_augmented(const PointConfiguration& eta, const Probe* extras,
                                         int n_extras, double* out) const {
    if (n_extras == 0) {
        evaluate(eta, out);
        return;
    }
    PointConfiguration aug = eta;
    for (int i = 0; i < n_extras; ++i) {
        const Probe& p = extras[static_cast<std::size_t>(i)];
        aug.push(p.x.data(), p.mark.empty() ? nullptr : p.mark.data());
    }
    evaluate(aug, out);
}

std::vector<double> FunctionalModel::value(const PointConfiguration& eta) const {
    std::vector<double> out(static_cast<std::size_t>(m()));
    evaluate(eta, out.data());
    return out;
}

std::vector<double> FunctionalModel::centered(const PointConfiguration& eta) const {
    std::vector<double> out = value(eta);
    const std::vector<double>& mu = mean_vector();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= mu[i];
    return out;
}

const std::vector<double>& FunctionalModel::mean_vector() const {
    if (mean_.size() != static_cast<std::size_t>(m()))
        mean_.assign(static_cast<std::size_t>(m()), 0.0);
    return mean_;
}

void FunctionalModel::set_mean_vector(std::vector<double> mu) {
    if (mu.size() != static_cast<std::size_t>(m()))
        throw domain_error("mean vector length does not match functional dimension");
    mean_ = std::move(mu);
}

}  // namespace poincare
