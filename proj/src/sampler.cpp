#include "poincare/sampler.hpp"

namespace poincare {

namespace {

void sample_location(const CarrierSpace& carrier, RngStream& rng, double* x) {
    if (carrier.constant_density()) {
        for (int k = 0; k < carrier.d(); ++k)
            x[k] = rng.next_uniform(carrier.lo(k), carrier.hi(k));
        return;
    }
    const double sup = carrier.density_sup();
    for (;;) {
        for (int k = 0; k < carrier.d(); ++k)
            x[k] = rng.next_uniform(carrier.lo(k), carrier.hi(k));
        double dens = carrier.density_at(x);
        if (dens > sup)
            throw domain_error("carrier density exceeds its declared sup bound");
        if (rng.next_uniform() * sup < dens) return;
    }
}

}  // namespace

Probe sample_probe(const CarrierSpace& carrier, const MarkSpace* marks, RngStream& rng) {
    Probe p;
    sample_location(carrier, rng, p.x.data());
    if (marks != nullptr && marks->mark_dim > 0) {
        p.mark.resize(static_cast<std::size_t>(marks->mark_dim));
        marks->sampler(rng, p.mark.data());
    }
    return p;
}

PointConfiguration sample_poisson_process(const CarrierSpace& carrier, const MarkSpace* marks,
                                          RngStream& rng) {
    if (!carrier.constant_density() && !(carrier.density_sup() > 0))
        throw config_error("rejection sampling needs an explicit density sup bound");
    const long n = rng.next_poisson(carrier.total_mass());
    const int mark_dim = (marks != nullptr) ? marks->mark_dim : 0;
    PointConfiguration config(carrier.d(), mark_dim);
    config.reserve(static_cast<std::size_t>(n));
    double x[3];
    std::vector<double> mk(static_cast<std::size_t>(mark_dim));
    for (long i = 0; i < n; ++i) {
        sample_location(carrier, rng, x);
        if (mark_dim > 0) marks->sampler(rng, mk.data());
        config.push(x, mark_dim > 0 ? mk.data() : nullptr);
    }
    return config;
}

std::vector<double> sample_gaussian(const GaussianTarget& target, RngStream& rng) {
    const int m = target.m();
    std::vector<double> z(static_cast<std::size_t>(m));
    for (auto& zi : z) zi = rng.next_normal();
    const Matrix& root = target.sqrt();
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += root(i, j) * z[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

PointConfiguration add_point(const CarrierSpace& carrier, const PointConfiguration& config,
                             const double* x, const double* mark) {
    if (!carrier.contains(x)) throw domain_error("added point lies outside the carrier box");
    PointConfiguration out = config;
    out.push(x, mark);
    return out;
}

}  // namespace poincare
