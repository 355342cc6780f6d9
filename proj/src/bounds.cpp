#include "poincare/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "poincare/rng.hpp"

namespace poincare {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

// Delta-method standard error of sqrt(v) given the error of v, guarded so a
// value at zero does not blow up the ratio.
double sqrt_std_error(double v, double se_v) {
    if (se_v <= 0) return 0.0;
    const double root = std::sqrt(std::max(v, 0.0));
    return se_v / (2.0 * std::max(root, std::sqrt(se_v)));
}

bool bounded_metric(const std::string& metric) {
    return metric == "dHl" || metric == "dconvex" || metric == "dK";
}

void finish_additive(BoundReport& r) {
    double tot = 0.0, var = 0.0;
    for (const BoundTerm& t : r.terms) {
        tot += t.contribution();
        var += sq(t.coefficient * t.std_error);
    }
    r.max_form = false;
    r.prefactor = 1.0;
    r.argmax = -1;
    r.total = tot;
    r.std_error = std::sqrt(var);
    r.vacuous = bounded_metric(r.metric) && r.total >= 1.0;
}

void finish_max(BoundReport& r, double prefactor) {
    if (r.terms.empty()) throw domain_error("max-form bound needs at least one term");
    int best = 0;
    for (int i = 1; i < static_cast<int>(r.terms.size()); ++i) {
        if (r.terms[static_cast<std::size_t>(i)].contribution() >
            r.terms[static_cast<std::size_t>(best)].contribution())
            best = i;
    }
    const BoundTerm& sel = r.terms[static_cast<std::size_t>(best)];
    r.max_form = true;
    r.prefactor = prefactor;
    r.argmax = best;
    r.total = prefactor * sel.contribution();
    r.std_error = prefactor * sel.coefficient * sel.std_error;
    r.vacuous = bounded_metric(r.metric) && r.total >= 1.0;
}

BoundTerm term(std::string name, double coefficient, double value, double se) {
    BoundTerm t;
    t.name = std::move(name);
    t.coefficient = coefficient;
    t.value = value;
    t.std_error = se;
    return t;
}

BoundTerm term(std::string name, double coefficient, const Estimate& e) {
    return term(std::move(name), coefficient, e.value, e.std_error);
}

BoundTerm term(std::string name, double coefficient, const GammaEstimate& g) {
    return term(std::move(name), coefficient, g.plug_in.value, g.plug_in.std_error);
}

void require_m(const GaussianTarget& target, int m, const char* where) {
    if (m != target.m())
        throw config_error(std::string(where) + ": dimension m does not match the target");
    if (m < 1) throw config_error(std::string(where) + ": m must be >= 1");
}

void require_convex_geometry(const ConvexGeometry& g, const char* where) {
    if (!(g.rho > 0) || !std::isfinite(g.rho))
        throw domain_error(std::string(where) +
                           ": needs a finite uniform difference bound rho "
                           "(assumption: max_i |D_x F_i| <= rho almost surely)");
    if (!(g.lambda_A > 0) || !std::isfinite(g.lambda_A))
        throw domain_error(std::string(where) + ": reference-set mass lambda_A must be positive");
    if (g.tail_integral < 0)
        throw domain_error(std::string(where) + ": tail integral must be nonnegative");
}

}  // namespace

std::string BoundReport::text_block() const {
    std::ostringstream os;
    os << display_id << " [" << metric << "]: total " << fmt_g17(total) << " (s.e. "
       << fmt_g17(std_error) << ")";
    if (vacuous) os << " -- vacuous at this scale (metric is <= 1 by definition)";
    os << "\n";
    if (max_form)
        os << "  form: prefactor " << fmt_g17(prefactor) << " times max over terms\n";
    else
        os << "  form: sum of coefficient * value over terms\n";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const BoundTerm& t = terms[i];
        os << "  " << t.name << ": coefficient " << fmt_g17(t.coefficient) << ", value "
           << fmt_g17(t.value) << ", s.e. " << fmt_g17(t.std_error);
        if (max_form && static_cast<int>(i) == argmax) os << "  <- selected";
        os << "\n";
    }
    return os.str();
}

BoundReport bound_d3(const GammaReport& gammas, const GaussianTarget& target, int m) {
    require_m(target, m, "d3 bound");
    BoundReport r;
    r.display_id = "GMB";
    r.metric = "d3";
    r.terms.push_back(term("cov_discrepancy", m / 2.0, gammas.cov_discrepancy));
    r.terms.push_back(term("gamma1", static_cast<double>(m), gammas.gamma1));
    r.terms.push_back(term("gamma2", m / 2.0, gammas.gamma2));
    r.terms.push_back(term("gamma3", m * m / 4.0, gammas.gamma3));
    finish_additive(r);
    return r;
}

BoundReport bound_d2(const GammaReport& gammas, const GaussianTarget& target, int m) {
    require_m(target, m, "d2 bound");
    target.require_positive_definite("d2 bound");
    const double inv = target.inv_op_norm();
    const double op = target.op_norm();
    BoundReport r;
    r.display_id = "GMBd2";
    r.metric = "d2";
    r.terms.push_back(term("cov_discrepancy", inv * std::sqrt(op), gammas.cov_discrepancy));
    r.terms.push_back(term("gamma1", 2.0 * inv * std::sqrt(op), gammas.gamma1));
    r.terms.push_back(term("gamma2", inv * std::sqrt(op), gammas.gamma2));
    r.terms.push_back(term("gamma3",
                           std::sqrt(2.0 * kPi) / 8.0 * m * m * std::pow(inv, 1.5) * op,
                           gammas.gamma3));
    finish_additive(r);
    return r;
}

BoundReport bound_dHl(const GammaReport& gammas, const GaussianTarget& target, int m, int l) {
    require_m(target, m, "half-space class bound");
    target.require_positive_definite("half-space class bound");
    if (l < 1) throw config_error("half-space class bound: l must be >= 1");
    const double inv = target.inv_op_norm();
    BoundReport r;
    r.display_id = "GMBdHl";
    r.metric = "dHl";
    r.terms.push_back(term("cov_discrepancy", 1.0, gammas.cov_discrepancy));
    r.terms.push_back(term("gamma1", 1.0, gammas.gamma1));
    r.terms.push_back(term("gamma2", 1.0, gammas.gamma2));
    r.terms.push_back(term("gamma4", 1.0, gammas.gamma4));
    const double g5 = std::max(gammas.gamma5.plug_in.value, 0.0);
    r.terms.push_back(term("sqrt_gamma5", std::sqrt(static_cast<double>(l)) / std::pow(inv, 0.25),
                           std::sqrt(g5),
                           sqrt_std_error(g5, gammas.gamma5.plug_in.std_error)));
    finish_max(r, 718.0 * std::pow(m, 47.0 / 24.0) * l * inv);
    return r;
}

BoundReport bound_dconvex(const GammaReport& gammas, const GaussianTarget& target, int m,
                          double rho, double lambda_A, double tail_integral) {
    require_m(target, m, "convex class bound");
    target.require_positive_definite("convex class bound");
    ConvexGeometry g;
    g.rho = rho;
    g.lambda_A = lambda_A;
    g.tail_integral = tail_integral;
    require_convex_geometry(g, "convex class bound");
    const double inv = target.inv_op_norm();
    BoundReport r;
    r.display_id = "Bounddconvex";
    r.metric = "dconvex";
    r.terms.push_back(term("cov_discrepancy", 1.0, gammas.cov_discrepancy));
    r.terms.push_back(term("gamma1", 1.0, gammas.gamma1));
    r.terms.push_back(term("gamma2", 1.0, gammas.gamma2));
    r.terms.push_back(term("gamma4", 1.0, gammas.gamma4));
    r.terms.push_back(term("difference_bound_cubed",
                           8.0 * std::sqrt(6.0) / 3.0 * m * m * std::sqrt(inv),
                           rho * rho * rho * lambda_A, 0.0));
    r.terms.push_back(term("difference_bound_root",
                           std::pow(m, 1.5) / std::pow(inv, 0.25),
                           std::sqrt(rho * rho * rho * rho * lambda_A), 0.0));
    r.terms.push_back(term("support_tail", 1.0 / (m * inv * lambda_A), tail_integral, 0.0));
    finish_max(r, 2304.0 * m * m * m * inv);
    return r;
}

BoundReport bound_marked(const BigGammaReport& big, const GaussianTarget& target, int m, int l,
                         const Estimate& discrepancy, BoundVariant variant,
                         const ConvexGeometry& geometry) {
    require_m(target, m, "marked bound");
    BoundReport r;
    switch (variant) {
        case BoundVariant::d3: {
            r.display_id = "MarkedD3";
            r.metric = "d3";
            r.terms.push_back(term("cov_discrepancy", m / 2.0, discrepancy));
            r.terms.push_back(term("Gamma1", 3.0 * std::pow(m, 1.5) / 2.0, big.gamma1));
            r.terms.push_back(term("Gamma2", m * m / 4.0, big.gamma2));
            finish_additive(r);
            return r;
        }
        case BoundVariant::d2: {
            target.require_positive_definite("marked d2 bound");
            const double inv = target.inv_op_norm();
            const double op = target.op_norm();
            r.display_id = "MarkedD2";
            r.metric = "d2";
            r.terms.push_back(term("cov_discrepancy", inv * std::sqrt(op), discrepancy));
            r.terms.push_back(term("Gamma1", 3.0 * inv * op * std::sqrt(m), big.gamma1));
            r.terms.push_back(term("Gamma2",
                                   std::sqrt(2.0 * kPi) / 8.0 * std::pow(inv, 1.5) * op * m * m,
                                   big.gamma2));
            finish_additive(r);
            return r;
        }
        case BoundVariant::dHl: {
            target.require_positive_definite("marked half-space class bound");
            if (l < 1) throw config_error("marked half-space class bound: l must be >= 1");
            if (!(big.p > 2))
                throw domain_error(
                    "marked half-space class bound needs moment exponent p > 2");
            const double inv = target.inv_op_norm();
            r.display_id = "MarkedDHl";
            r.metric = "dHl";
            r.terms.push_back(term("cov_discrepancy", 1.0, discrepancy));
            r.terms.push_back(term("Gamma1", 1.0, big.gamma1));
            r.terms.push_back(term("Gamma3", 1.0, big.gamma3));
            const double g4 = std::max(big.gamma4.plug_in.value, 0.0);
            r.terms.push_back(term("sqrt_Gamma4",
                                   std::sqrt(static_cast<double>(l)) / std::pow(inv, 0.25),
                                   std::sqrt(g4),
                                   sqrt_std_error(g4, big.gamma4.plug_in.std_error)));
            finish_max(r, 718.0 * std::pow(m, 65.0 / 24.0) * l * inv);
            return r;
        }
        case BoundVariant::dconvex: {
            target.require_positive_definite("marked convex class bound");
            if (!(big.p > 2))
                throw domain_error("marked convex class bound needs moment exponent p > 2");
            require_convex_geometry(geometry, "marked convex class bound");
            const double inv = target.inv_op_norm();
            r.display_id = "MarkedDconvex";
            r.metric = "dconvex";
            r.terms.push_back(term("cov_discrepancy", 1.0, discrepancy));
            r.terms.push_back(term("Gamma1", 1.0, big.gamma1));
            r.terms.push_back(term("Gamma3", 1.0, big.gamma3));
            r.terms.push_back(term("difference_bound_cubed",
                                   8.0 * std::sqrt(6.0) / 3.0 * std::sqrt(inv),
                                   geometry.rho * geometry.rho * geometry.rho * geometry.lambda_A,
                                   0.0));
            r.terms.push_back(
                term("difference_bound_root", 1.0 / std::pow(inv, 0.25),
                     std::sqrt(std::pow(geometry.rho, 4.0) * geometry.lambda_A), 0.0));
            r.terms.push_back(term("support_tail", 1.0 / (m * inv * geometry.lambda_A),
                                   geometry.tail_integral, 0.0));
            finish_max(r, 2304.0 * std::pow(m, 5.0) * inv);
            return r;
        }
    }
    throw config_error("unknown marked bound variant");
}

BoundReport bound_compound(BoundVariant variant, const GaussianTarget& target, int m, double s,
                           const CompoundMoments& moments, int l) {
    require_m(target, m, "compound-sum bound");
    if (!(s > 0)) throw config_error("compound-sum bound: scale s must be positive");
    const double root_s = std::sqrt(s);
    auto sum_checked = [m](const std::vector<double>& v, const char* what) {
        if (static_cast<int>(v.size()) != m)
            throw config_error(std::string("compound-sum bound: ") + what +
                               " needs one entry per component");
        double tot = 0.0;
        for (double x : v) {
            if (!(x >= 0)) throw domain_error(std::string("compound-sum bound: ") + what +
                                              " entries must be nonnegative");
            tot += x;
        }
        return tot;
    };
    BoundReport r;
    switch (variant) {
        case BoundVariant::d3: {
            r.display_id = "CompoundD3";
            r.metric = "d3";
            r.terms.push_back(term("third_moment_sum", m * m / 4.0 / root_s,
                                   sum_checked(moments.abs3, "third absolute moments"), 0.0));
            finish_additive(r);
            return r;
        }
        case BoundVariant::d2: {
            target.require_positive_definite("compound-sum d2 bound");
            const double inv = target.inv_op_norm();
            const double op = target.op_norm();
            r.display_id = "CompoundD2";
            r.metric = "d2";
            r.terms.push_back(
                term("third_moment_sum",
                     std::sqrt(2.0 * kPi) / 8.0 * m * m * std::pow(inv, 1.5) * op / root_s,
                     sum_checked(moments.abs3, "third absolute moments"), 0.0));
            finish_additive(r);
            return r;
        }
        case BoundVariant::dHl: {
            target.require_positive_definite("compound-sum half-space class bound");
            if (l < 1) throw config_error("compound-sum bound: l must be >= 1");
            const double inv = target.inv_op_norm();
            r.display_id = "CompoundDHl";
            r.metric = "dHl";
            r.terms.push_back(term("fourth_moment_root", 1.0,
                                   std::sqrt(sum_checked(moments.mom4, "fourth moments")), 0.0));
            r.terms.push_back(
                term("sixth_moment_root", 1.0,
                     std::pow(sum_checked(moments.mom6, "sixth moments"), 0.25), 0.0));
            finish_max(r, 718.0 * std::pow(m, 59.0 / 24.0) * std::pow(l, 1.5) *
                              std::max(inv, std::pow(inv, 0.75)) / root_s);
            return r;
        }
        case BoundVariant::dconvex: {
            target.require_positive_definite("compound-sum convex class bound");
            if (!(moments.a > 0) || !std::isfinite(moments.a))
                throw domain_error(
                    "compound-sum convex class bound needs a finite uniform increment bound a");
            const double inv = target.inv_op_norm();
            r.display_id = "CompoundDconvex";
            r.metric = "dconvex";
            r.terms.push_back(term("increment_bound_squared", 1.0, moments.a * moments.a, 0.0));
            r.terms.push_back(
                term("increment_bound_cubed", 1.0, std::pow(moments.a, 3.0), 0.0));
            finish_max(r, 15050.0 * std::pow(m, 5.0) *
                              std::max(std::pow(inv, 0.75), std::pow(inv, 1.5)) / root_s);
            return r;
        }
    }
    throw config_error("unknown compound-sum bound variant");
}

BoundReport bound_first_order(BoundVariant variant, const GaussianTarget& target, int m,
                              const FirstOrderIngredients& ing, int l) {
    require_m(target, m, "first-order bound");
    if (ing.discrepancy < 0 || ing.int_abs3 < 0 || ing.int4 < 0 || ing.int6 < 0)
        throw domain_error("first-order bound: moment integrals must be nonnegative");
    BoundReport r;
    switch (variant) {
        case BoundVariant::d3: {
            r.display_id = "FirstOrderD3";
            r.metric = "d3";
            r.terms.push_back(term("cov_discrepancy", m / 2.0, ing.discrepancy, 0.0));
            r.terms.push_back(term("kernel_abs3_integral", m * m / 4.0, ing.int_abs3, 0.0));
            finish_additive(r);
            return r;
        }
        case BoundVariant::d2: {
            target.require_positive_definite("first-order d2 bound");
            const double inv = target.inv_op_norm();
            const double op = target.op_norm();
            r.display_id = "FirstOrderD2";
            r.metric = "d2";
            r.terms.push_back(term("cov_discrepancy", inv * std::sqrt(op), ing.discrepancy, 0.0));
            r.terms.push_back(
                term("kernel_abs3_integral",
                     std::sqrt(2.0 * kPi) / 8.0 * m * m * std::pow(inv, 1.5) * op,
                     ing.int_abs3, 0.0));
            finish_additive(r);
            return r;
        }
        case BoundVariant::dHl: {
            target.require_positive_definite("first-order half-space class bound");
            if (l < 1) throw config_error("first-order bound: l must be >= 1");
            const double inv = target.inv_op_norm();
            r.display_id = "FirstOrderDHl";
            r.metric = "dHl";
            r.terms.push_back(term("cov_discrepancy", 1.0, ing.discrepancy, 0.0));
            r.terms.push_back(term("kernel4_root", 1.0, std::sqrt(ing.int4), 0.0));
            r.terms.push_back(term("kernel6_root", 1.0, std::pow(ing.int6, 0.25), 0.0));
            finish_max(r, 718.0 * std::pow(m, 59.0 / 24.0) * std::pow(l, 1.5) *
                              std::max(inv, std::pow(inv, 0.75)));
            return r;
        }
        case BoundVariant::dconvex: {
            target.require_positive_definite("first-order convex class bound");
            if (!(ing.rho > 0) || !std::isfinite(ing.rho))
                throw domain_error(
                    "first-order convex class bound needs a finite uniform kernel bound rho");
            if (!(ing.lambda_X > 0))
                throw domain_error("first-order convex class bound needs finite carrier mass");
            const double inv = target.inv_op_norm();
            r.display_id = "FirstOrderDconvex";
            r.metric = "dconvex";
            r.terms.push_back(term("cov_discrepancy", 1.0, ing.discrepancy, 0.0));
            r.terms.push_back(
                term("kernel_bound_cubed", 1.0, std::pow(ing.rho, 3.0) * ing.lambda_X, 0.0));
            r.terms.push_back(term("kernel_bound_squared", 1.0,
                                   ing.rho * ing.rho * std::sqrt(ing.lambda_X), 0.0));
            finish_max(r, 15050.0 * std::pow(m, 5.0) *
                              std::max(std::pow(inv, 0.75), std::pow(inv, 1.5)));
            return r;
        }
    }
    throw config_error("unknown first-order bound variant");
}

RateFit rate_slope(const std::vector<std::pair<double, double>>& scale_value,
                   const std::vector<double>& std_errors, long n_boot, std::uint64_t seed) {
    const std::size_t n = scale_value.size();
    if (n < 2) throw domain_error("rate fit needs at least two scales");
    if (!std_errors.empty() && std_errors.size() != n)
        throw config_error("rate fit: one standard error per point, or none");
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(scale_value[i].first > 0) || !(scale_value[i].second > 0))
            throw domain_error("rate fit needs positive scales and values");
        xs[i] = std::log(scale_value[i].first);
        ys[i] = std::log(scale_value[i].second);
    }
    auto fit = [&xs, n](const std::vector<double>& y) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += xs[i];
            my += y[i];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += sq(xs[i] - mx);
            sxy += (xs[i] - mx) * (y[i] - my);
        }
        if (!(sxx > 0)) throw domain_error("rate fit needs at least two distinct scales");
        const double slope = sxy / sxx;
        return std::pair<double, double>{slope, my - slope * mx};
    };
    RateFit out;
    const auto base = fit(ys);
    out.slope = base.first;
    out.intercept = base.second;
    out.n_boot = n_boot;
    if (n_boot < 2) {
        out.ci_lo = out.ci_hi = out.slope;
        return out;
    }
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = ys[i] - (base.second + base.first * xs[i]);
    RngStream rng(seed);
    std::vector<double> slopes(static_cast<std::size_t>(n_boot));
    std::vector<double> yb(n);
    for (long b = 0; b < n_boot; ++b) {
        RngStream rb = rng.sub(static_cast<std::uint64_t>(b));
        for (std::size_t i = 0; i < n; ++i) {
            if (!std_errors.empty()) {
                // First-order log-scale error: se(log v) = se(v) / v.
                const double rel = std_errors[i] / scale_value[i].second;
                yb[i] = ys[i] + rel * rb.next_normal();
            } else {
                yb[i] = base.second + base.first * xs[i] +
                        resid[static_cast<std::size_t>(rb.next_below(static_cast<std::uint64_t>(n)))];
            }
        }
        slopes[static_cast<std::size_t>(b)] = fit(yb).first;
    }
    std::sort(slopes.begin(), slopes.end());
    const auto at = [&slopes](double q) {
        const double pos = q * static_cast<double>(slopes.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= slopes.size()) return slopes.back();
        return slopes[i] * (1.0 - frac) + slopes[i + 1] * frac;
    };
    out.ci_lo = at(0.025);
    out.ci_hi = at(0.975);
    return out;
}

const std::vector<NamedConstant>& constants_table() {
    static const std::vector<NamedConstant> table = {
        {"half_space_class_prefactor", 718.0, "dHl bounds (plain and marked)"},
        {"convex_class_prefactor", 2304.0, "dconvex bounds (plain and marked)"},
        {"compound_convex_prefactor", 15050.0, "compound-sum and first-order dconvex"},
        {"second_derivative_catalog_constant", 444.0,
         "second-derivative squared-sum bound at smoothing scale t"},
        {"d2_third_moment_coefficient", std::sqrt(2.0 * kPi) / 8.0, "d2 bounds"},
        {"convex_geometry_coefficient", 8.0 * std::sqrt(6.0) / 3.0,
         "dconvex difference-bound term"},
        {"half_space_smoothing_rate", 24.0 / std::sqrt(kPi),
         "half-space class smoothing error per sqrt(t)"},
        {"convex_smoothing_rate", 20.0 / std::sqrt(kPi),
         "convex class smoothing error per sqrt(t)/(1-t)"},
        {"third_derivative_sup_coefficient", 6.0,
         "sup bound on third derivatives of smoothed Stein solutions"},
        {"third_moment_operator_coefficient", std::sqrt(6.0),
         "second-moment constant dominance for third derivatives"},
    };
    return table;
}

void write_bound_csv(std::ostream& os, const std::vector<BoundReport>& reports) {
    os << "display,metric,term,coefficient,value,std_error,total,vacuous\n";
    for (const BoundReport& r : reports) {
        for (const BoundTerm& t : r.terms) {
            os << r.display_id << ',' << r.metric << ',' << t.name << ','
               << fmt_g17(t.coefficient) << ',' << fmt_g17(t.value) << ','
               << fmt_g17(t.std_error) << ',' << fmt_g17(r.total) << ','
               << (r.vacuous ? 1 : 0) << "\n";
        }
    }
}

}  // namespace poincare
