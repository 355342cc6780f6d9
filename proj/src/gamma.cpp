#include "poincare/gamma.hpp"

#include <algorithm>
#include <cmath>

#include "poincare/difference.hpp"
#include "poincare/sampler.hpp"

namespace poincare {

namespace {

// Support events |difference| > tol treat floating-point noise around the
// genuine exact zeros of the models as zero.
constexpr double kSupportTol = 1e-12;

struct PowStat {
    double plug = 0.0;
    double debi = 0.0;
};

// pow(mean(v), expo) plus its jackknife bias correction; v must be
// componentwise nonnegative (squares, absolute powers, indicators).
PowStat pow_of_mean(const std::vector<double>& v, double expo) {
    const std::size_t n = v.size();
    const double total = pairwise_sum(v);
    const double mean = std::max(total / static_cast<double>(n), 0.0);
    PowStat out;
    out.plug = std::pow(mean, expo);
    if (n < 2) {
        out.debi = out.plug;
        return out;
    }
    std::vector<double> loo(n);
    for (std::size_t r = 0; r < n; ++r) {
        double m1 = std::max((total - v[r]) / static_cast<double>(n - 1), 0.0);
        loo[r] = std::pow(m1, expo);
    }
    double jbar = pairwise_sum(loo) / static_cast<double>(n);
    out.debi = static_cast<double>(n) * out.plug - static_cast<double>(n - 1) * jbar;
    if (out.debi < 0) out.debi = 0;
    return out;
}

PowStat plain_mean(const std::vector<double>& v) {
    PowStat out;
    out.plug = out.debi = pairwise_sum(v) / static_cast<double>(v.size());
    return out;
}

// Outer combination for quantities defined through a final square root:
// clip the outer mean at zero, delta-method standard error (guarded near 0).
GammaEstimate finalize_sqrt(const std::vector<double>& plug_outer,
                            const std::vector<double>& debi_outer, const NestedMcPlan& plan) {
    GammaEstimate g;
    const double S = mean_of(plug_outer);
    const double se = std_error_of(plug_outer);
    g.pre_clip = S;
    const double value = std::sqrt(std::max(S, 0.0));
    double gse = 0.0;
    if (se > 0.0) gse = se / (2.0 * std::max(value, std::sqrt(se)));
    g.unstable = (se > 0.0 && S < -3.0 * se);
    g.plug_in = Estimate{value, gse, plan.n_outer, plan.seed};
    g.debiased = std::sqrt(std::max(mean_of(debi_outer), 0.0));
    return g;
}

GammaEstimate finalize_plain(const std::vector<double>& plug_outer,
                             const std::vector<double>& debi_outer, const NestedMcPlan& plan) {
    GammaEstimate g;
    g.plug_in = make_estimate(plug_outer, plan.seed);
    g.plug_in.n_replicates = plan.n_outer;
    g.pre_clip = g.plug_in.value;
    g.debiased = mean_of(debi_outer);
    g.unstable = (g.plug_in.std_error > 0.0 &&
                  g.plug_in.value < -3.0 * g.plug_in.std_error);
    return g;
}

void require_plan(const NestedMcPlan& plan) {
    if (plan.n_outer < 1 || plan.n_inner < 1)
        throw config_error("nested MC plan needs n_outer >= 1 and n_inner >= 1");
}

// Probe marks are redrawn for every inner replicate: the support and moment
// integrands average over the mark of the probe as well as the process.
void refresh_marks(std::vector<Probe>& probes, const MarkSpace* marks, RngStream& rng) {
    if (marks == nullptr || marks->mark_dim == 0) return;
    for (auto& p : probes) {
        p.mark.resize(static_cast<std::size_t>(marks->mark_dim));
        marks->sampler(rng, p.mark.data());
    }
}

using InnerStore = std::vector<std::vector<double>>;  // [component][replicate]

InnerStore make_store(std::size_t slots, long n_inner) {
    InnerStore s(slots);
    for (auto& v : s) v.reserve(static_cast<std::size_t>(n_inner));
    return s;
}

}  // namespace

CovarianceEstimate estimate_covariance(const FunctionalModel& F, const CarrierSpace& carrier,
                                       const MarkSpace* marks, long n, std::uint64_t seed) {
    if (n < 2) throw domain_error("covariance estimation needs at least two replicates");
    const auto m = static_cast<std::size_t>(F.m());
    RngStream root(seed);
    std::vector<std::vector<double>> vals(m, std::vector<double>(static_cast<std::size_t>(n)));
    for (long r = 0; r < n; ++r) {
        RngStream rep = root.sub(stream_tag::kCovariance, static_cast<std::uint64_t>(r));
        PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
        std::vector<double> v = F.centered(eta);
        for (std::size_t i = 0; i < m; ++i) vals[i][static_cast<std::size_t>(r)] = v[i];
    }

    std::vector<double> sums(m);
    for (std::size_t i = 0; i < m; ++i) sums[i] = pairwise_sum(vals[i]);

    Matrix cov = Matrix::identity(static_cast<int>(m));
    Matrix se = Matrix::identity(static_cast<int>(m));
    const double dn = static_cast<double>(n);
    std::vector<double> prod(static_cast<std::size_t>(n)), loo(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r)
                prod[r] = vals[i][r] * vals[j][r];
            const double sij = pairwise_sum(prod);
            const double cij = (sij - sums[i] * sums[j] / dn) / (dn - 1.0);
            // Leave-one-out covariances for the jackknife standard error.
            for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
                const double np = dn - 1.0;
                const double si = sums[i] - vals[i][r];
                const double sj = sums[j] - vals[j][r];
                const double sp = sij - prod[r];
                loo[r] = (sp - si * sj / np) / (np - 1.0);
            }
            const double lbar = pairwise_sum(loo) / dn;
            for (auto& l : loo) l = (l - lbar) * (l - lbar);
            const double sij_se = std::sqrt((dn - 1.0) / dn * pairwise_sum(loo));
            cov(static_cast<int>(i), static_cast<int>(j)) = cij;
            cov(static_cast<int>(j), static_cast<int>(i)) = cij;
            se(static_cast<int>(i), static_cast<int>(j)) = sij_se;
            se(static_cast<int>(j), static_cast<int>(i)) = sij_se;
        }
    }
    return CovarianceEstimate(std::move(cov), std::move(se), n, seed);
}

Estimate covariance_discrepancy(const Matrix& sigma, const CovarianceEstimate& cov) {
    if (sigma.n() != cov.cov.n()) throw domain_error("covariance dimensions do not match");
    double total = 0.0, var = 0.0;
    for (int i = 0; i < sigma.n(); ++i) {
        for (int j = 0; j < sigma.n(); ++j) {
            total += std::abs(sigma(i, j) - cov.cov(i, j));
            var += cov.se(i, j) * cov.se(i, j);
        }
    }
    return Estimate{total, std::sqrt(var), cov.n, cov.seed};
}

GammaEstimate estimate_gamma3(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const NestedMcPlan& plan) {
    require_plan(plan);
    const auto m = static_cast<std::size_t>(F.m());
    RngStream root(plan.seed);
    const double w1 = carrier.total_mass();
    std::vector<double> outer(static_cast<std::size_t>(plan.n_outer));
    for (long r = 0; r < plan.n_outer; ++r) {
        RngStream g = root.sub(stream_tag::kGamma3, static_cast<std::uint64_t>(r));
        RngStream pr = g.sub(0);
        std::vector<Probe> probes{sample_probe(carrier, marks, pr)};
        std::vector<double> inner;
        inner.reserve(static_cast<std::size_t>(plan.n_inner));
        for (long k = 0; k < plan.n_inner; ++k) {
            RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
            refresh_marks(probes, marks, rep);
            PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
            DifferenceSample ds = diff_batch(F, eta, probes, {});
            double v = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                double d = std::abs(ds.d1[0][c]);
                v += d * d * d;
            }
            inner.push_back(w1 * v);
        }
        outer[static_cast<std::size_t>(r)] = pairwise_sum(inner) / static_cast<double>(plan.n_inner);
    }
    return finalize_plain(outer, outer, plan);
}

Gamma12 estimate_gamma1_gamma2(const FunctionalModel& F, const CarrierSpace& carrier,
                               const MarkSpace* marks, const NestedMcPlan& plan) {
    require_plan(plan);
    const auto m = static_cast<std::size_t>(F.m());
    RngStream root(plan.seed);
    const double mass = carrier.total_mass();
    const double w3 = mass * mass * mass;
    const auto no = static_cast<std::size_t>(plan.n_outer);
    std::vector<double> plug1(no), debi1(no), plug2(no), debi2(no);
    const std::vector<std::pair<int, int>> pairs{{0, 2}, {1, 2}};
    for (long r = 0; r < plan.n_outer; ++r) {
        RngStream g = root.sub(stream_tag::kGamma1, static_cast<std::uint64_t>(r));
        RngStream pr = g.sub(0);
        std::vector<Probe> probes{sample_probe(carrier, marks, pr),
                                  sample_probe(carrier, marks, pr),
                                  sample_probe(carrier, marks, pr)};
        InnerStore a = make_store(m, plan.n_inner);  // (D2_{13})^2 (D2_{23})^2
        InnerStore b = make_store(m, plan.n_inner);  // (D_1)^2 (D_2)^2
        for (long k = 0; k < plan.n_inner; ++k) {
            RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
            refresh_marks(probes, marks, rep);
            PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
            DifferenceSample ds = diff_batch(F, eta, probes, pairs);
            for (std::size_t c = 0; c < m; ++c) {
                const double d13 = ds.d2[0][c], d23 = ds.d2[1][c];
                const double d1 = ds.d1[0][c], d2 = ds.d1[1][c];
                a[c].push_back(d13 * d13 * d23 * d23);
                b[c].push_back(d1 * d1 * d2 * d2);
            }
        }
        double sa_p = 0, sa_d = 0, sb_p = 0, sb_d = 0;
        for (std::size_t c = 0; c < m; ++c) {
            PowStat pa = pow_of_mean(a[c], 0.5);
            PowStat pb = pow_of_mean(b[c], 0.5);
            sa_p += pa.plug;
            sa_d += pa.debi;
            sb_p += pb.plug;
            sb_d += pb.debi;
        }
        const auto rr = static_cast<std::size_t>(r);
        plug1[rr] = w3 * sa_p * sb_p;
        debi1[rr] = w3 * sa_d * sb_d;
        plug2[rr] = w3 * sa_p * sa_p;
        debi2[rr] = w3 * sa_d * sa_d;
    }
    return Gamma12{finalize_sqrt(plug1, debi1, plan), finalize_sqrt(plug2, debi2, plan)};
}

GammaEstimate estimate_gamma4(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const NestedMcPlan& plan) {
    require_plan(plan);
    const auto m = static_cast<std::size_t>(F.m());
    RngStream root(plan.seed);
    const double w1 = carrier.total_mass();
    const double w2 = w1 * w1;
    const auto no = static_cast<std::size_t>(plan.n_outer);
    std::vector<double> plug(no), debi(no);
    const std::vector<std::pair<int, int>> pairs{{0, 1}};
    for (long r = 0; r < plan.n_outer; ++r) {
        RngStream g = root.sub(stream_tag::kGamma4, static_cast<std::uint64_t>(r));
        RngStream pr = g.sub(0);
        std::vector<Probe> probes{sample_probe(carrier, marks, pr),
                                  sample_probe(carrier, marks, pr)};
        InnerStore p4 = make_store(m, plan.n_inner);  // (D_x F_c)^4
        InnerStore q4 = make_store(m, plan.n_inner);  // (D2_{x,y} F_c)^4
        for (long k = 0; k < plan.n_inner; ++k) {
            RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
            refresh_marks(probes, marks, rep);
            PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
            DifferenceSample ds = diff_batch(F, eta, probes, pairs);
            for (std::size_t c = 0; c < m; ++c) {
                const double d = ds.d1[0][c], dd = ds.d2[0][c];
                p4[c].push_back(d * d * d * d);
                q4[c].push_back(dd * dd * dd * dd);
            }
        }
        double t1_p = 0, t1_d = 0, sp_p = 0, sp_d = 0, sq_p = 0, sq_d = 0;
        for (std::size_t c = 0; c < m; ++c) {
            PowStat mp = plain_mean(p4[c]);
            t1_p += mp.plug;
            t1_d += mp.debi;
            PowStat rp = pow_of_mean(p4[c], 0.5);
            sp_p += rp.plug;
            sp_d += rp.debi;
            PowStat rq = pow_of_mean(q4[c], 0.5);
            sq_p += rq.plug;
            sq_d += rq.debi;
        }
        const double dm = static_cast<double>(m);
        const auto rr = static_cast<std::size_t>(r);
        plug[rr] = dm * w1 * t1_p + 6.0 * w2 * sq_p * sp_p + 3.0 * w2 * sq_p * sq_p;
        debi[rr] = dm * w1 * t1_d + 6.0 * w2 * sq_d * sp_d + 3.0 * w2 * sq_d * sq_d;
    }
    return finalize_sqrt(plug, debi, plan);
}

GammaEstimate estimate_gamma5(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const NestedMcPlan& plan) {
    require_plan(plan);
    const auto m = static_cast<std::size_t>(F.m());
    RngStream root(plan.seed);
    const double w1 = carrier.total_mass();
    const double w2 = w1 * w1;
    const auto no = static_cast<std::size_t>(plan.n_outer);
    std::vector<double> plug(no), debi(no);
    const std::vector<std::pair<int, int>> pairs{{0, 1}};
    for (long r = 0; r < plan.n_outer; ++r) {
        RngStream g = root.sub(stream_tag::kGamma5, static_cast<std::uint64_t>(r));
        RngStream pr = g.sub(0);
        std::vector<Probe> probes{sample_probe(carrier, marks, pr),
                                  sample_probe(carrier, marks, pr)};
        InnerStore u6 = make_store(m, plan.n_inner);       // (D_x F_c)^6
        InnerStore v6 = make_store(m, plan.n_inner);       // (D2_{x,y} F_c)^6
        InnerStore cross = make_store(m * m, plan.n_inner);  // 1{D2 != 0} |D_i D_j|^3
        for (long k = 0; k < plan.n_inner; ++k) {
            RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
            refresh_marks(probes, marks, rep);
            PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
            DifferenceSample ds = diff_batch(F, eta, probes, pairs);
            bool d2_nonzero = false;  // joint vector event
            for (std::size_t c = 0; c < m; ++c)
                if (std::abs(ds.d2[0][c]) > kSupportTol) d2_nonzero = true;
            for (std::size_t c = 0; c < m; ++c) {
                const double d = ds.d1[0][c], dd = ds.d2[0][c];
                const double d2s = d * d, dd2 = dd * dd;
                u6[c].push_back(d2s * d2s * d2s);
                v6[c].push_back(dd2 * dd2 * dd2);
            }
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    double w = 0.0;
                    if (d2_nonzero) {
                        double prod = std::abs(ds.d1[0][i] * ds.d1[0][j]);
                        w = prod * prod * prod;
                    }
                    cross[i * m + j].push_back(w);
                }
            }
        }
        double t1_p = 0, t1_d = 0;                   // plain sixth moments of D
        double u13_p = 0, u13_d = 0, v13_p = 0, v13_d = 0;
        double x23_p = 0, x23_d = 0;
        for (std::size_t c = 0; c < m; ++c) {
            PowStat mu = plain_mean(u6[c]);
            t1_p += mu.plug;
            t1_d += mu.debi;
            PowStat pu = pow_of_mean(u6[c], 1.0 / 3.0);
            u13_p += pu.plug;
            u13_d += pu.debi;
            PowStat pv = pow_of_mean(v6[c], 1.0 / 3.0);
            v13_p += pv.plug;
            v13_d += pv.debi;
        }
        for (std::size_t ij = 0; ij < m * m; ++ij) {
            PowStat px = pow_of_mean(cross[ij], 2.0 / 3.0);
            x23_p += px.plug;
            x23_d += px.debi;
        }
        const double dm = static_cast<double>(m);
        const auto rr = static_cast<std::size_t>(r);
        plug[rr] = dm * dm * w1 * t1_p + w2 * (8.0 * x23_p * u13_p +
                                               42.0 * v13_p * u13_p * u13_p +
                                               42.0 * v13_p * v13_p * u13_p +
                                               14.0 * v13_p * v13_p * v13_p);
        debi[rr] = dm * dm * w1 * t1_d + w2 * (8.0 * x23_d * u13_d +
                                               42.0 * v13_d * u13_d * u13_d +
                                               42.0 * v13_d * v13_d * u13_d +
                                               14.0 * v13_d * v13_d * v13_d);
    }
    return finalize_sqrt(plug, debi, plan);
}

BigGammaReport estimate_big_gammas(const FunctionalModel& F, const CarrierSpace& carrier,
                                   const MarkSpace* marks, double c, double p,
                                   const NestedMcPlan& plan) {
    require_plan(plan);
    if (!(c > 0)) throw domain_error("moment bound c must be positive");
    if (!(p > 0)) throw domain_error("moment exponent p must be positive");
    if (!(p > 2))
        throw domain_error(
            "the fourth support ingredient requires p > 2; request a larger moment exponent");
    if (plan.n_mid < 2)
        throw config_error("squared inner integrals need n_mid >= 2 secondary probes");

    const auto m = static_cast<std::size_t>(F.m());
    const auto M = static_cast<std::size_t>(plan.n_mid);
    RngStream root(plan.seed);
    const double w1 = carrier.total_mass();
    const double w2 = w1 * w1;
    const auto no = static_cast<std::size_t>(plan.n_outer);
    BigGammaReport report;
    report.c = c;
    report.p = p;

    const double e1 = p / (16.0 + 4.0 * p);
    const double e2 = (1.0 + p) / (4.0 + p);
    const double e3a = p / (8.0 + 2.0 * p), e3b = p / (4.0 + p);
    const double e4a = (p - 2.0) / (12.0 + 3.0 * p), e4b = (p - 2.0) / (4.0 + p);
    const double pref1 = std::pow(c, 2.0 / (4.0 + p));
    const double pref2 = std::pow(c, 3.0 / (4.0 + p));

    // First ingredient: squared inner integral over a fan of secondary
    // probes sharing one replicate set; the a != b product removes the
    // squaring bias of the mid-probe average.
    {
        std::vector<double> plug(no), debi(no);
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t a = 0; a < M; ++a) pairs.emplace_back(0, static_cast<int>(1 + a));
        for (long r = 0; r < plan.n_outer; ++r) {
            RngStream g = root.sub(stream_tag::kBigGamma, 0, static_cast<std::uint64_t>(r));
            RngStream pr = g.sub(0);
            std::vector<Probe> probes;
            probes.reserve(1 + M);
            for (std::size_t a = 0; a < 1 + M; ++a)
                probes.push_back(sample_probe(carrier, marks, pr));
            InnerStore ind = make_store(m * M, plan.n_inner);
            for (long k = 0; k < plan.n_inner; ++k) {
                RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
                refresh_marks(probes, marks, rep);
                PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
                DifferenceSample ds = diff_batch(F, eta, probes, pairs);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t a = 0; a < M; ++a)
                        ind[i * M + a].push_back(
                            std::abs(ds.d2[a][i]) > kSupportTol ? 1.0 : 0.0);
            }
            double sum_p = 0, sum_d = 0;
            for (std::size_t i = 0; i < m; ++i) {
                double s_p = 0, s_d = 0, ss_p = 0, ss_d = 0;
                for (std::size_t a = 0; a < M; ++a) {
                    PowStat ps = pow_of_mean(ind[i * M + a], e1);
                    s_p += ps.plug;
                    s_d += ps.debi;
                    ss_p += ps.plug * ps.plug;
                    ss_d += ps.debi * ps.debi;
                }
                const double denom = static_cast<double>(M) * static_cast<double>(M - 1);
                sum_p += w2 * (s_p * s_p - ss_p) / denom;
                sum_d += w2 * (s_d * s_d - ss_d) / denom;
            }
            plug[static_cast<std::size_t>(r)] = pref1 * pref1 * w1 * sum_p;
            debi[static_cast<std::size_t>(r)] = pref1 * pref1 * w1 * sum_d;
        }
        report.gamma1 = finalize_sqrt(plug, debi, plan);
    }

    // Second ingredient: single-probe support probability of the first
    // difference, powered and integrated (no final square root).
    {
        std::vector<double> plug(no), debi(no);
        for (long r = 0; r < plan.n_outer; ++r) {
            RngStream g = root.sub(stream_tag::kBigGamma, 1, static_cast<std::uint64_t>(r));
            RngStream pr = g.sub(0);
            std::vector<Probe> probes{sample_probe(carrier, marks, pr)};
            InnerStore ind = make_store(m, plan.n_inner);
            for (long k = 0; k < plan.n_inner; ++k) {
                RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
                refresh_marks(probes, marks, rep);
                PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
                DifferenceSample ds = diff_batch(F, eta, probes, {});
                for (std::size_t i = 0; i < m; ++i)
                    ind[i].push_back(std::abs(ds.d1[0][i]) > kSupportTol ? 1.0 : 0.0);
            }
            double s_p = 0, s_d = 0;
            for (std::size_t i = 0; i < m; ++i) {
                PowStat ps = pow_of_mean(ind[i], e2);
                s_p += ps.plug;
                s_d += ps.debi;
            }
            plug[static_cast<std::size_t>(r)] = pref2 * w1 * s_p;
            debi[static_cast<std::size_t>(r)] = pref2 * w1 * s_d;
        }
        report.gamma2 = finalize_plain(plug, debi, plan);
    }

    // Third and fourth ingredients share one probe pair and one replicate
    // set; they only differ in exponents and coefficients.
    {
        std::vector<double> plug3(no), debi3(no), plug4(no), debi4(no);
        const std::vector<std::pair<int, int>> pairs{{0, 1}};
        for (long r = 0; r < plan.n_outer; ++r) {
            RngStream g = root.sub(stream_tag::kBigGamma, 2, static_cast<std::uint64_t>(r));
            RngStream pr = g.sub(0);
            std::vector<Probe> probes{sample_probe(carrier, marks, pr),
                                      sample_probe(carrier, marks, pr)};
            InnerStore ind1 = make_store(m, plan.n_inner);
            InnerStore ind2 = make_store(m, plan.n_inner);
            for (long k = 0; k < plan.n_inner; ++k) {
                RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
                refresh_marks(probes, marks, rep);
                PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
                DifferenceSample ds = diff_batch(F, eta, probes, pairs);
                for (std::size_t i = 0; i < m; ++i) {
                    ind1[i].push_back(std::abs(ds.d1[0][i]) > kSupportTol ? 1.0 : 0.0);
                    ind2[i].push_back(std::abs(ds.d2[0][i]) > kSupportTol ? 1.0 : 0.0);
                }
            }
            double s3_p = 0, s3_d = 0, s4_p = 0, s4_d = 0;
            for (std::size_t i = 0; i < m; ++i) {
                PowStat p3a = pow_of_mean(ind2[i], e3a), p3b = pow_of_mean(ind1[i], e3b);
                PowStat p4a = pow_of_mean(ind2[i], e4a), p4b = pow_of_mean(ind1[i], e4b);
                s3_p += 9.0 * w2 * p3a.plug + w1 * p3b.plug;
                s3_d += 9.0 * w2 * p3a.debi + w1 * p3b.debi;
                s4_p += 106.0 * w2 * p4a.plug + w1 * p4b.plug;
                s4_d += 106.0 * w2 * p4a.debi + w1 * p4b.debi;
            }
            const auto rr = static_cast<std::size_t>(r);
            plug3[rr] = pref1 * pref1 * s3_p;
            debi3[rr] = pref1 * pref1 * s3_d;
            plug4[rr] = pref2 * pref2 * s4_p;
            debi4[rr] = pref2 * pref2 * s4_d;
        }
        report.gamma3 = finalize_sqrt(plug3, debi3, plan);
        report.gamma4 = finalize_sqrt(plug4, debi4, plan);
    }
    return report;
}

std::vector<Estimate> estimate_dirichlet_energy(const FunctionalModel& F,
                                                const CarrierSpace& carrier,
                                                const MarkSpace* marks,
                                                const NestedMcPlan& plan) {
    require_plan(plan);
    const auto m = static_cast<std::size_t>(F.m());
    RngStream root(plan.seed);
    const double w1 = carrier.total_mass();
    std::vector<std::vector<double>> outer(m,
                                           std::vector<double>(static_cast<std::size_t>(plan.n_outer)));
    for (long r = 0; r < plan.n_outer; ++r) {
        RngStream g = root.sub(stream_tag::kEnergy, static_cast<std::uint64_t>(r));
        RngStream pr = g.sub(0);
        std::vector<Probe> probes{sample_probe(carrier, marks, pr)};
        InnerStore sq = make_store(m, plan.n_inner);
        for (long k = 0; k < plan.n_inner; ++k) {
            RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
            refresh_marks(probes, marks, rep);
            PointConfiguration eta = sample_poisson_process(carrier, marks, rep);
            DifferenceSample ds = diff_batch(F, eta, probes, {});
            for (std::size_t c = 0; c < m; ++c) sq[c].push_back(ds.d1[0][c] * ds.d1[0][c]);
        }
        for (std::size_t c = 0; c < m; ++c)
            outer[c][static_cast<std::size_t>(r)] =
                w1 * pairwise_sum(sq[c]) / static_cast<double>(plan.n_inner);
    }
    std::vector<Estimate> out;
    out.reserve(m);
    for (std::size_t c = 0; c < m; ++c) out.push_back(make_estimate(outer[c], plan.seed));
    return out;
}

bool AssumptionReport::all_pass() const {
    for (const auto& row : rows)
        if (!row.diff_pass || !row.support_pass) return false;
    return true;
}

AssumptionReport check_scaling_assumptions(const ModelFamily& family,
                                           const std::vector<double>& scales, double a, double b,
                                           const NestedMcPlan& plan) {
    require_plan(plan);
    if (plan.n_mid < 2) throw config_error("the support integral needs n_mid >= 2 probes");
    AssumptionReport report;
    report.a = a;
    report.b = b;
    for (std::size_t sc = 0; sc < scales.size(); ++sc) {
        const double s = scales[sc];
        ScaledModel sm = family(s);
        const auto m = static_cast<std::size_t>(sm.model->m());
        const auto M = static_cast<std::size_t>(plan.n_mid);
        // The reference measure integrates the carrier density without the
        // scale factor, so the s-scaled support integral uses mass / s.
        const double mu_mass = sm.carrier.total_mass() / s;
        RngStream root(plan.seed);

        AssumptionScaleRow row;
        row.s = s;
        row.diff_threshold = a / std::sqrt(s);
        double best_val = 0.0, best_se = 0.0;
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t q = 0; q < M; ++q) pairs.emplace_back(0, static_cast<int>(1 + q));
        for (long r = 0; r < plan.n_outer; ++r) {
            RngStream g = root.sub(stream_tag::kAssumptions, static_cast<std::uint64_t>(sc),
                                   static_cast<std::uint64_t>(r));
            RngStream pr = g.sub(0);
            std::vector<Probe> probes;
            probes.reserve(1 + M);
            for (std::size_t q = 0; q < 1 + M; ++q)
                probes.push_back(sample_probe(sm.carrier, sm.marks_ptr(), pr));
            InnerStore ind = make_store(M, plan.n_inner);  // joint event over components
            for (long k = 0; k < plan.n_inner; ++k) {
                RngStream rep = g.sub(1 + static_cast<std::uint64_t>(k));
                refresh_marks(probes, sm.marks_ptr(), rep);
                PointConfiguration eta = sample_poisson_process(sm.carrier, sm.marks_ptr(), rep);
                DifferenceSample ds = diff_batch(*sm.model, eta, probes, pairs);
                for (const auto& d1 : ds.d1)
                    for (std::size_t c = 0; c < m; ++c)
                        row.max_abs_d1 = std::max(row.max_abs_d1, std::abs(d1[c]));
                for (std::size_t q = 0; q < M; ++q) {
                    double worst = 0.0;
                    for (std::size_t c = 0; c < m; ++c)
                        worst = std::max(worst, std::abs(ds.d2[q][c]));
                    row.max_abs_d2 = std::max(row.max_abs_d2, worst);
                    ind[q].push_back(worst > kSupportTol ? 1.0 : 0.0);
                }
            }
            // s * integral over the second probe of P(D2 != 0)^{1/4}.
            std::vector<double> per_mid(M);
            for (std::size_t q = 0; q < M; ++q)
                per_mid[q] = s * mu_mass * pow_of_mean(ind[q], 0.25).plug;
            const double val = mean_of(per_mid);
            if (val > best_val) {
                best_val = val;
                best_se = std_error_of(per_mid);
            }
        }
        row.support_integral = Estimate{best_val, best_se, plan.n_outer, plan.seed};
        row.diff_pass =
            row.max_abs_d1 <= row.diff_threshold + 1e-12 && row.max_abs_d2 <= row.diff_threshold + 1e-12;
        row.support_pass = best_val <= b;
        report.rows.push_back(row);
    }
    return report;
}

GammaReport full_gamma_report(const FunctionalModel& F, const CarrierSpace& carrier,
                              const MarkSpace* marks, const GaussianTarget& target,
                              const NestedMcPlan& plan) {
    GammaReport report;
    Gamma12 g12 = estimate_gamma1_gamma2(F, carrier, marks, plan);
    report.gamma1 = g12.gamma1;
    report.gamma2 = g12.gamma2;
    report.gamma3 = estimate_gamma3(F, carrier, marks, plan);
    report.gamma4 = estimate_gamma4(F, carrier, marks, plan);
    report.gamma5 = estimate_gamma5(F, carrier, marks, plan);
    long n_cov = std::max<long>(plan.n_outer * plan.n_inner / 10, 100);
    report.cov = estimate_covariance(F, carrier, marks, n_cov, plan.seed);
    report.cov_discrepancy = covariance_discrepancy(target.sigma(), report.cov);
    report.n_outer = plan.n_outer;
    report.n_inner = plan.n_inner;
    report.seed = plan.seed;
    return report;
}

void write_gamma_csv(std::ostream& os, const GammaReport& report) {
    os << "term,value,std_error,n_outer,n_inner,seed\n";
    auto row = [&](const char* name, double value, double se) {
        os << name << ',' << fmt_g17(value) << ',' << fmt_g17(se) << ',' << report.n_outer << ','
           << report.n_inner << ',' << report.seed << '\n';
    };
    auto gamma_rows = [&](const char* name, const GammaEstimate& g) {
        row(name, g.plug_in.value, g.plug_in.std_error);
        std::string dn = std::string(name) + "_debiased";
        row(dn.c_str(), g.debiased, g.plug_in.std_error);
    };
    gamma_rows("gamma1", report.gamma1);
    gamma_rows("gamma2", report.gamma2);
    gamma_rows("gamma3", report.gamma3);
    gamma_rows("gamma4", report.gamma4);
    gamma_rows("gamma5", report.gamma5);
    row("cov_discrepancy", report.cov_discrepancy.value, report.cov_discrepancy.std_error);
}

}  // namespace poincare
