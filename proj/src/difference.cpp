#include "poincare/difference.hpp"

#include "poincare/common.hpp"

namespace poincare {

std::vector<double> diff1(const FunctionalModel& F, const PointConfiguration& eta,
                          const Probe& x) {
    const auto m = static_cast<std::size_t>(F.m());
    std::vector<double> base(m), aug(m);
    F.evaluate(eta, base.data());
    F.evaluate_augmented(eta, &x, 1, aug.data());
    for (std::size_t i = 0; i < m; ++i) aug[i] -= base[i];
    return aug;
}

std::vector<double> diff2(const FunctionalModel& F, const PointConfiguration& eta,
                          const Probe& x1, const Probe& x2) {
    const auto m = static_cast<std::size_t>(F.m());
    std::vector<double> base(m), a1(m), a2(m), a12(m);
    F.evaluate(eta, base.data());
    F.evaluate_augmented(eta, &x1, 1, a1.data());
    F.evaluate_augmented(eta, &x2, 1, a2.data());
    const Probe both[2] = {x1, x2};
    F.evaluate_augmented(eta, both, 2, a12.data());
    for (std::size_t i = 0; i < m; ++i) a12[i] += base[i] - a1[i] - a2[i];
    return a12;
}

DifferenceSample diff_batch(const FunctionalModel& F, const PointConfiguration& eta,
                            const std::vector<Probe>& probes,
                            const std::vector<std::pair<int, int>>& pairs) {
    const auto m = static_cast<std::size_t>(F.m());
    DifferenceSample out;
    out.base_value.resize(m);
    F.evaluate(eta, out.base_value.data());

    // Single-augmentation values, shared between d1 and the pair formulas.
    std::vector<std::vector<double>> aug1(probes.size(), std::vector<double>(m));
    out.d1.resize(probes.size(), std::vector<double>(m));
    for (std::size_t i = 0; i < probes.size(); ++i) {
        F.evaluate_augmented(eta, &probes[i], 1, aug1[i].data());
        for (std::size_t c = 0; c < m; ++c) out.d1[i][c] = aug1[i][c] - out.base_value[c];
    }

    out.pair_index = pairs;
    out.d2.resize(pairs.size(), std::vector<double>(m));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= probes.size() ||
            static_cast<std::size_t>(j) >= probes.size())
            throw domain_error("pair index outside the probe list");
        const Probe both[2] = {probes[static_cast<std::size_t>(i)],
                               probes[static_cast<std::size_t>(j)]};
        std::vector<double> a12(m);
        F.evaluate_augmented(eta, both, 2, a12.data());
        for (std::size_t c = 0; c < m; ++c)
            out.d2[k][c] = a12[c] - aug1[static_cast<std::size_t>(i)][c] -
                           aug1[static_cast<std::size_t>(j)][c] + out.base_value[c];
    }
    return out;
}

}  // namespace poincare
