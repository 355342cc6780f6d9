#include "poincare/stein.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "poincare/rng.hpp"

namespace poincare {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> scaled_shift(const std::vector<double>& y, double c) {
    std::vector<double> s(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) s[j] = c * y[j];
    return s;
}

double he1(double z) { return z; }
double he2(double z) { return z * z - 1.0; }
double he3(double z) { return z * (z * z - 3.0); }

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw domain_error("Gauss-Legendre rule needs at least one node");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0 = 1.0, p1 = 0.0, dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (xi * p0 - p1) / (xi * xi - 1.0);
            const double dx = p0 / dp;
            xi -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        x[i] = -xi;
        x[n - 1 - i] = xi;
        const double wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

Estimate smooth_h(const TestFunction& h, double t, const GaussianTarget& target,
                  const std::vector<double>& y, const GaussProbPlan& plan) {
    if (!(t > 0.0 && t <= 1.0)) throw domain_error("smoothing time must lie in (0, 1]");
    if (static_cast<int>(y.size()) != target.m())
        throw domain_error("smoothing point dimension does not match the target");
    const TestFunction region =
        h.affine_preimage(std::sqrt(t), scaled_shift(y, std::sqrt(1.0 - t)));
    return gaussian_region_prob(region, target, plan);
}

SteinSolution::SteinSolution(const TestFunction& h, const GaussianTarget& target, double t,
                             const QuadratureSpec& spec)
    : h_(h), target_(target), t_(t), spec_(spec) {
    if (!(t > 0.0 && t < 1.0)) throw domain_error("interpolant time must lie in (0, 1)");
    if (h.m() != target.m()) throw domain_error("test function dimension mismatch");
    if (spec.n_draws < 2) throw domain_error("interpolant solver needs at least two draws");
    if (spec.n_nodes < 2) throw domain_error("interpolant solver needs at least two nodes");
    if (!(spec.tail_cut > 0.0 && spec.tail_cut < 1.0))
        throw domain_error("interpolant tail cut must lie in (0, 1)");
    target_.require_positive_definite("interpolant solver");

    const double u_max = 1.0 - t;
    u_min_ = u_max * spec.tail_cut;

    // Gauss-Legendre in v = log u; the du = u dv jacobian joins the weight.
    std::vector<double> gx, gw;
    gauss_legendre(spec.n_nodes, gx, gw);
    const double v_lo = std::log(u_min_), v_hi = std::log(u_max);
    nodes_.resize(spec.n_nodes + 1);
    for (int i = 0; i < spec.n_nodes; ++i) {
        const double v = 0.5 * (v_lo + v_hi) + 0.5 * (v_hi - v_lo) * gx[i];
        Node& nd = nodes_[i];
        nd.u = std::exp(v);
        nd.s = 1.0 - nd.u;
        nd.weight = 0.5 * (v_hi - v_lo) * gw[i] * nd.u;
    }
    // Analytic completion below u_min: the integrand of order p in sqrt(u)
    // integrates to u g(u) / (1 + p/2), evaluated from the tail node.
    Node& tail = nodes_.back();
    tail.u = u_min_;
    tail.s = 1.0 - u_min_;
    tail.weight = u_min_;  // per-order factor applied in node_sums

    const int m = target_.m();
    RngStream g = RngStream(spec.seed).sub(stream_tag::kStein);
    const Matrix& S = target_.sqrt();
    const Matrix& Sinv = target_.inv_sqrt();
    z_.assign(static_cast<std::size_t>(spec.n_draws) * m, 0.0);
    w_.assign(z_.size(), 0.0);
    zeta2_.assign(spec.n_draws, 0.0);
    base_in_.assign(spec.n_draws, 0);
    std::vector<double> zeta(m);
    for (long k = 0; k < spec.n_draws; ++k) {
        double n2 = 0.0;
        for (int j = 0; j < m; ++j) {
            zeta[j] = g.next_normal();
            n2 += zeta[j] * zeta[j];
        }
        zeta2_[k] = n2;
        double* zr = z_.data() + static_cast<std::size_t>(k) * m;
        double* wr = w_.data() + static_cast<std::size_t>(k) * m;
        for (int i = 0; i < m; ++i) {
            double zv = 0.0, wv = 0.0;
            for (int j = 0; j < m; ++j) {
                zv += S(i, j) * zeta[j];
                wv += Sinv(i, j) * zeta[j];
            }
            zr[i] = zv;
            wr[i] = wv;
        }
        base_in_[k] = h_.evaluate(zr) ? 1 : 0;
    }

    exact_ = true;
    switch (h_.kind()) {
        case TestFunction::Kind::halfspaces: exact_ = h_.n_halfspaces() <= 2; break;
        case TestFunction::Kind::ball: exact_ = m == 1; break;
        case TestFunction::Kind::axis_box: exact_ = m <= 2; break;
    }
    GaussProbPlan pa;
    pa.seed = spec.seed;
    p_region_ = gaussian_region_prob(h_, target_, pa);
}

Estimate SteinSolution::region_prob() const { return p_region_; }

void SteinSolution::indicator_table(const std::vector<double>& y,
                                    std::vector<std::uint8_t>& H) const {
    const int m = target_.m();
    if (static_cast<int>(y.size()) != m)
        throw domain_error("interpolant evaluated at wrong dimension");
    const int cols = static_cast<int>(nodes_.size());
    H.assign(static_cast<std::size_t>(spec_.n_draws) * cols, 0);
    std::vector<double> rs(cols), ru(cols);
    for (int i = 0; i < cols; ++i) {
        rs[i] = std::sqrt(nodes_[i].s);
        ru[i] = std::sqrt(nodes_[i].u);
    }
    std::vector<double> x(m);
    for (long k = 0; k < spec_.n_draws; ++k) {
        const double* zr = z_.data() + static_cast<std::size_t>(k) * m;
        std::uint8_t* row = H.data() + static_cast<std::size_t>(k) * cols;
        for (int i = 0; i < cols; ++i) {
            for (int j = 0; j < m; ++j) x[j] = rs[i] * zr[j] + ru[i] * y[j];
            row[i] = h_.evaluate(x.data()) ? 1 : 0;
        }
    }
}

// Node-weighted indicator sums per draw for the three derivative kernels:
// A for order one (kernel 1/(2 sqrt(s) sqrt(u))), B for order two (1/(2s)),
// C for order three (sqrt(u)/(2 s^{3/2})). Tail factors 2, 1, 2/3 complete
// the closed tail integrals of sqrt(u) powers -1, 0, +1.
void SteinSolution::node_sums(const std::vector<std::uint8_t>& H, std::vector<double>& A,
                              std::vector<double>& B, std::vector<double>& C) const {
    const int cols = static_cast<int>(nodes_.size());
    std::vector<double> ca(cols), cb(cols), cc(cols);
    for (int i = 0; i < cols; ++i) {
        const Node& nd = nodes_[i];
        const double c1 = 0.5 / (std::sqrt(nd.s) * std::sqrt(nd.u));
        const double c2 = 0.5 / nd.s;
        const double c3 = 0.5 * std::sqrt(nd.u) / (nd.s * std::sqrt(nd.s));
        const bool is_tail = (i == cols - 1);
        ca[i] = nd.weight * c1 * (is_tail ? 2.0 : 1.0);
        cb[i] = nd.weight * c2 * (is_tail ? 1.0 : 1.0);
        cc[i] = nd.weight * c3 * (is_tail ? 2.0 / 3.0 : 1.0);
    }
    A.assign(spec_.n_draws, 0.0);
    B.assign(spec_.n_draws, 0.0);
    C.assign(spec_.n_draws, 0.0);
    for (long k = 0; k < spec_.n_draws; ++k) {
        const std::uint8_t* row = H.data() + static_cast<std::size_t>(k) * cols;
        double a = 0.0, b = 0.0, c = 0.0;
        for (int i = 0; i < cols; ++i) {
            if (!row[i]) continue;
            a += ca[i];
            b += cb[i];
            c += cc[i];
        }
        A[k] = a;
        B[k] = b;
        C[k] = c;
    }
}

Estimate SteinSolution::value(const std::vector<double>& y) const {
    const int cols = static_cast<int>(nodes_.size());
    if (exact_) {
        GaussProbPlan plan;
        plan.seed = spec_.seed;
        double total = 0.0;
        for (int i = 0; i < cols; ++i) {
            const Node& nd = nodes_[i];
            const TestFunction region =
                h_.affine_preimage(std::sqrt(nd.s), scaled_shift(y, std::sqrt(nd.u)));
            const double ps = gaussian_region_prob(region, target_, plan).value;
            const double c0 = 0.5 / nd.u;
            const double factor = (i == cols - 1) ? 2.0 : 1.0;
            total += nd.weight * c0 * factor * (ps - p_region_.value);
        }
        Estimate e;
        e.value = total;
        e.std_error = 0.0;
        e.n_replicates = 0;
        e.seed = spec_.seed;
        return e;
    }
    std::vector<std::uint8_t> H;
    indicator_table(y, H);
    std::vector<double> reps(spec_.n_draws, 0.0);
    std::vector<double> cv(cols);
    for (int i = 0; i < cols; ++i)
        cv[i] = nodes_[i].weight * (0.5 / nodes_[i].u) * ((i == cols - 1) ? 2.0 : 1.0);
    for (long k = 0; k < spec_.n_draws; ++k) {
        const std::uint8_t* row = H.data() + static_cast<std::size_t>(k) * cols;
        double v = 0.0;
        for (int i = 0; i < cols; ++i) v += cv[i] * (row[i] - base_in_[k]);
        reps[k] = v;
    }
    return make_estimate(reps, spec_.seed);
}

std::vector<Estimate> SteinSolution::gradient(const std::vector<double>& y) const {
    std::vector<std::uint8_t> H;
    indicator_table(y, H);
    std::vector<double> A, B, C;
    node_sums(H, A, B, C);
    const int m = target_.m();
    std::vector<Estimate> out(m);
    std::vector<double> reps(spec_.n_draws);
    for (int i = 0; i < m; ++i) {
        for (long k = 0; k < spec_.n_draws; ++k)
            reps[k] = A[k] * w_[static_cast<std::size_t>(k) * m + i];
        out[i] = make_estimate(reps, spec_.seed);
    }
    return out;
}

std::vector<Estimate> SteinSolution::hessian(const std::vector<double>& y) const {
    std::vector<std::uint8_t> H;
    indicator_table(y, H);
    std::vector<double> A, B, C;
    node_sums(H, A, B, C);
    const int m = target_.m();
    const Matrix& inv = target_.inverse();
    std::vector<Estimate> out(static_cast<std::size_t>(m) * m);
    std::vector<double> reps(spec_.n_draws);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            for (long k = 0; k < spec_.n_draws; ++k) {
                const double* wr = w_.data() + static_cast<std::size_t>(k) * m;
                reps[k] = B[k] * (wr[i] * wr[j] - inv(i, j));
            }
            out[static_cast<std::size_t>(i) * m + j] = make_estimate(reps, spec_.seed);
        }
    return out;
}

std::vector<Estimate> SteinSolution::third(const std::vector<double>& y) const {
    std::vector<std::uint8_t> H;
    indicator_table(y, H);
    std::vector<double> A, B, C;
    node_sums(H, A, B, C);
    const int m = target_.m();
    const Matrix& inv = target_.inverse();
    std::vector<Estimate> out(static_cast<std::size_t>(m) * m * m);
    std::vector<double> reps(spec_.n_draws);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k3 = 0; k3 < m; ++k3) {
                for (long k = 0; k < spec_.n_draws; ++k) {
                    const double* wr = w_.data() + static_cast<std::size_t>(k) * m;
                    const double q = inv(i, k3) * wr[j] + inv(j, k3) * wr[i] +
                                     inv(i, j) * wr[k3] - wr[i] * wr[j] * wr[k3];
                    reps[k] = -C[k] * q;
                }
                out[(static_cast<std::size_t>(i) * m + j) * m + k3] =
                    make_estimate(reps, spec_.seed);
            }
    return out;
}

Estimate SteinSolution::residual(const std::vector<double>& y) const {
    const int m = target_.m();
    std::vector<std::uint8_t> H;
    indicator_table(y, H);
    std::vector<double> A, B, C;
    node_sums(H, A, B, C);
    const Matrix& sigma = target_.sigma();
    // <y, grad f> - <Sigma, Hess f> per draw; w' Sigma w is |zeta|^2 exactly
    // and <Sigma, Sigma^{-1}> is the dimension.
    std::vector<double> reps(spec_.n_draws);
    for (long k = 0; k < spec_.n_draws; ++k) {
        const double* wr = w_.data() + static_cast<std::size_t>(k) * m;
        double yw = 0.0;
        for (int i = 0; i < m; ++i) yw += y[i] * wr[i];
        reps[k] = A[k] * yw - B[k] * (zeta2_[k] - m);
        (void)sigma;
    }
    const Estimate rhs = make_estimate(reps, spec_.seed);
    GaussProbPlan plan;
    plan.seed = spec_.seed;
    const Estimate lhs = smooth_h(h_, t_, target_, y, plan);
    Estimate r;
    r.value = (lhs.value - p_region_.value) - rhs.value;
    r.std_error = lhs.std_error + p_region_.std_error + rhs.std_error;
    r.n_replicates = spec_.n_draws;
    r.seed = spec_.seed;
    return r;
}

double constant_M2(int m) {
    if (m < 1) throw domain_error("second-derivative constant needs m >= 1");
    // 1-D blocks by quadrature, split at the sign changes of the integrands.
    auto abs_dd = [](double x) { return std::fabs((x * x - 1.0) * normal_pdf(x)); };
    auto abs_d = [](double x) { return std::fabs(-x * normal_pdf(x)); };
    const double i2 = 2.0 * (adaptive_simpson(abs_dd, 0.0, 1.0, 1e-12) +
                             adaptive_simpson(abs_dd, 1.0, 10.0, 1e-12));
    const double i1 = 2.0 * adaptive_simpson(abs_d, 0.0, 10.0, 1e-12);
    const double v = 0.25 * (m * i2 * i2 + static_cast<double>(m) * (m - 1) * i1 * i1 * i1 * i1);
    if (v > static_cast<double>(m) * m)
        throw domain_error("second-derivative constant exceeded its cap");
    return v;
}

Estimate constant_M3(int m, long n_draws, std::uint64_t seed) {
    if (m < 1 || m > 8) throw domain_error("third-derivative constant supports 1 <= m <= 8");
    if (n_draws < 2) throw domain_error("third-derivative constant needs draws");
    RngStream g = RngStream(seed).sub(stream_tag::kStein, 3);
    std::vector<double> reps(n_draws);
    std::vector<double> z(m);
    for (long r = 0; r < n_draws; ++r) {
        for (int j = 0; j < m; ++j) z[j] = g.next_normal();
        double total = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double term;
                    if (i == j && j == k) {
                        term = he3(z[i]);
                    } else if (i == j) {
                        term = he2(z[i]) * he1(z[k]);
                    } else if (i == k) {
                        term = he2(z[i]) * he1(z[j]);
                    } else if (j == k) {
                        term = he2(z[j]) * he1(z[i]);
                    } else {
                        term = he1(z[i]) * he1(z[j]) * he1(z[k]);
                    }
                    total += term * term;
                }
        reps[r] = std::sqrt(total);
    }
    return make_estimate(reps, seed);
}

Estimate hermite3_second_moment(long n_draws, std::uint64_t seed) {
    if (n_draws < 2) throw domain_error("cubic moment needs draws");
    RngStream g = RngStream(seed).sub(stream_tag::kStein, 4);
    std::vector<double> reps(n_draws);
    for (long r = 0; r < n_draws; ++r) {
        const double h = he3(g.next_normal());
        reps[r] = h * h;
    }
    return make_estimate(reps, seed);
}

void write_stein_csv(std::ostream& os, const std::vector<SteinCheckRow>& rows) {
    os << "check,lhs,rhs,margin,se,pass\n";
    for (const SteinCheckRow& r : rows) {
        os << r.check << ',' << fmt_g17(r.lhs) << ',' << fmt_g17(r.rhs) << ','
           << fmt_g17(r.margin) << ',' << fmt_g17(r.se) << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

std::vector<TestFunction> random_halfspace_catalog(int m, int l, int count,
                                                   const GaussianTarget& target,
                                                   std::uint64_t seed) {
    if (m != target.m()) throw domain_error("catalog dimension mismatch");
    if (l < 1 || count < 1) throw domain_error("catalog needs l >= 1 and count >= 1");
    std::vector<TestFunction> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        RngStream rs = RngStream(seed).sub(stream_tag::kChecks, 5, static_cast<std::uint64_t>(c));
        std::vector<std::vector<double>> dirs(l, std::vector<double>(m));
        std::vector<double> offsets(l);
        for (int k = 0; k < l; ++k) {
            double n2 = 0.0;
            do {
                n2 = 0.0;
                for (int j = 0; j < m; ++j) {
                    dirs[k][j] = rs.next_normal();
                    n2 += dirs[k][j] * dirs[k][j];
                }
            } while (n2 < 1e-12);
            const double inv = 1.0 / std::sqrt(n2);
            for (double& v : dirs[k]) v *= inv;
            double var = 0.0;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) var += dirs[k][a] * target.sigma()(a, b) * dirs[k][b];
            offsets[k] = std::sqrt(std::max(var, 1e-12)) * 1.2 * rs.next_normal();
        }
        out.push_back(TestFunction::halfspaces(std::move(dirs), std::move(offsets)));
    }
    return out;
}

std::vector<TestFunction> random_convex_catalog(int m, int count, const GaussianTarget& target,
                                                std::uint64_t seed) {
    if (m != target.m()) throw domain_error("catalog dimension mismatch");
    if (count < 1) throw domain_error("catalog needs count >= 1");
    std::vector<double> sd(m);
    for (int j = 0; j < m; ++j) sd[j] = std::sqrt(std::max(0.0, target.sigma()(j, j)));
    double trace = 0.0;
    for (int j = 0; j < m; ++j) trace += target.sigma()(j, j);
    const double scale = std::sqrt(trace / m);
    std::vector<TestFunction> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        RngStream rs = RngStream(seed).sub(stream_tag::kChecks, 6, static_cast<std::uint64_t>(c));
        switch (c % 3) {
            case 0: {
                std::vector<double> center(m);
                for (int j = 0; j < m; ++j) center[j] = 0.5 * sd[j] * rs.next_normal();
                const double radius = scale * (0.4 + std::fabs(rs.next_normal()));
                out.push_back(TestFunction::ball(std::move(center), radius));
                break;
            }
            case 1: {
                std::vector<double> lo(m), hi(m);
                for (int j = 0; j < m; ++j) {
                    const double center = 0.5 * sd[j] * rs.next_normal();
                    const double half = sd[j] * (0.3 + std::fabs(rs.next_normal()));
                    lo[j] = center - half;
                    hi[j] = center + half;
                }
                out.push_back(TestFunction::axis_box(std::move(lo), std::move(hi)));
                break;
            }
            default: {
                auto hs = random_halfspace_catalog(
                    m, std::min(2 * m, 4), 1, target,
                    seed ^ (0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(c)));
                out.push_back(hs.front());
                break;
            }
        }
    }
    return out;
}

SteinCheckRow check_residual(const SteinSolution& f, const std::vector<double>& y,
                             double tol_abs) {
    const Estimate r = f.residual(y);
    SteinCheckRow row;
    row.check = "interpolant_residual";
    row.lhs = std::fabs(r.value);
    row.rhs = std::max(tol_abs, 3.0 * r.std_error);
    row.margin = row.rhs - row.lhs;
    row.se = r.std_error;
    row.pass = row.lhs <= row.rhs;
    return row;
}

std::vector<SteinCheckRow> check_derivative_sup_bounds(const TestFunction& h,
                                                       const GaussianTarget& target, double t,
                                                       int n_points, const QuadratureSpec& spec) {
    if (n_points < 1) throw domain_error("sup-bound check needs evaluation points");
    target.require_positive_definite("derivative sup bounds");
    const int m = target.m();
    const double inv = target.inv_op_norm();
    SteinSolution f(h, target, t, spec);
    RngStream g = RngStream(spec.seed).sub(stream_tag::kChecks, 2);
    const Matrix& S = target.sqrt();
    std::vector<double> zeta(m), y(m);

    double max2 = 0.0, se2 = 0.0, max3 = 0.0, se3 = 0.0;
    for (int p = 0; p < n_points; ++p) {
        for (int j = 0; j < m; ++j) zeta[j] = g.next_normal();
        for (int i = 0; i < m; ++i) {
            double v = 0.0;
            for (int j = 0; j < m; ++j) v += S(i, j) * zeta[j];
            y[i] = v;
        }
        for (const Estimate& e : f.hessian(y)) {
            if (std::fabs(e.value) > max2) {
                max2 = std::fabs(e.value);
                se2 = e.std_error;
            }
        }
        for (const Estimate& e : f.third(y)) {
            if (std::fabs(e.value) > max3) {
                max3 = std::fabs(e.value);
                se3 = e.std_error;
            }
        }
    }
    SteinCheckRow r2;
    r2.check = "hessian_sup_bound";
    r2.lhs = max2;
    r2.rhs = static_cast<double>(m) * m * inv * std::fabs(std::log(t));
    r2.margin = r2.rhs - r2.lhs;
    r2.se = se2;
    r2.pass = r2.lhs <= r2.rhs + 3.0 * r2.se;
    SteinCheckRow r3;
    r3.check = "third_sup_bound";
    r3.lhs = max3;
    r3.rhs = 6.0 * std::pow(static_cast<double>(m), 3.0) * std::pow(inv, 1.5) / std::sqrt(t);
    r3.margin = r3.rhs - r3.lhs;
    r3.se = se3;
    r3.pass = r3.lhs <= r3.rhs + 3.0 * r3.se;
    return {r2, r3};
}

SteinCheckRow check_second_derivative_catalog(const std::vector<TestFunction>& catalog,
                                              const SampleBlock& y_samples,
                                              const GaussianTarget& target, double t,
                                              double d_h2l, const QuadratureSpec& spec) {
    if (catalog.empty()) throw domain_error("catalog check needs test functions");
    if (y_samples.n < 2) throw domain_error("catalog check needs samples");
    target.require_positive_definite("second-derivative catalog");
    const int m = target.m();
    const double inv = target.inv_op_norm();

    double sup = -1.0, sup_se = 0.0;
    std::vector<double> y(m), totals;
    for (const TestFunction& h : catalog) {
        SteinSolution f(h, target, t, spec);
        totals.assign(y_samples.n, 0.0);
        double inner_se = 0.0;
        for (long r = 0; r < y_samples.n; ++r) {
            y.assign(y_samples.row(r), y_samples.row(r) + m);
            double total = 0.0, se_term = 0.0;
            for (const Estimate& e : f.hessian(y)) {
                total += e.value * e.value;
                se_term += 2.0 * std::fabs(e.value) * e.std_error;
            }
            totals[r] = total;
            inner_se += se_term;
        }
        const double mean = mean_of(totals);
        const double se = std_error_of(totals) + inner_se / y_samples.n;
        if (mean > sup) {
            sup = mean;
            sup_se = se;
        }
    }
    SteinCheckRow row;
    row.check = "second_derivative_catalog";
    row.lhs = sup;
    const double logt = std::log(t);
    row.rhs = inv * inv *
              (constant_M2(m) * logt * logt * d_h2l + 444.0 * std::pow(static_cast<double>(m), 23.0 / 6.0));
    row.margin = row.rhs - row.lhs;
    row.se = sup_se;
    row.pass = row.lhs <= row.rhs + 3.0 * row.se;
    return row;
}

namespace {

// sup_h |mean_r E h_t(Y_r) - E h(N)| over a catalog, with its standard error.
void smoothed_sup(const std::vector<TestFunction>& catalog, const SampleBlock& y_samples,
                  const GaussianTarget& target, double t, const GaussProbPlan& prob, double* sup,
                  double* sup_se) {
    *sup = -1.0;
    *sup_se = 0.0;
    std::vector<double> vals;
    std::vector<double> y(target.m());
    for (const TestFunction& h : catalog) {
        const Estimate pa = gaussian_region_prob(h, target, prob);
        vals.assign(y_samples.n, 0.0);
        double inner = 0.0;
        for (long r = 0; r < y_samples.n; ++r) {
            y.assign(y_samples.row(r), y_samples.row(r) + target.m());
            const Estimate s = smooth_h(h, t, target, y, prob);
            vals[r] = s.value;
            inner += s.std_error;
        }
        const double gap = std::fabs(mean_of(vals) - pa.value);
        const double se = std_error_of(vals) + inner / y_samples.n + pa.std_error;
        if (gap > *sup) {
            *sup = gap;
            *sup_se = se;
        }
    }
}

}  // namespace

SteinCheckRow check_halfspace_smoothing(const std::vector<TestFunction>& catalog,
                                        const SampleBlock& y_samples,
                                        const GaussianTarget& target, double t, int l,
                                        const DistanceEstimate& dhl, const GaussProbPlan& prob) {
    if (catalog.empty()) throw domain_error("smoothing check needs a catalog");
    double sup = 0.0, sup_se = 0.0;
    smoothed_sup(catalog, y_samples, target, t, prob, &sup, &sup_se);
    SteinCheckRow row;
    row.check = "halfspace_smoothing_bound";
    row.lhs = dhl.value;
    row.rhs = 2.0 * sup +
              (24.0 * l * std::sqrt(static_cast<double>(target.m())) / std::sqrt(kPi)) *
                  std::sqrt(t);
    row.margin = row.rhs - row.lhs;
    row.se = dhl.std_error + 2.0 * sup_se;
    row.pass = row.lhs <= row.rhs + 3.0 * row.se;
    return row;
}

SteinCheckRow check_convex_smoothing(const std::vector<TestFunction>& catalog,
                                     const SampleBlock& std_samples, double t,
                                     const DistanceEstimate& dconvex, const GaussProbPlan& prob) {
    if (catalog.empty()) throw domain_error("smoothing check needs a catalog");
    const int m = std_samples.m;
    GaussianTarget identity(Matrix::identity(m));
    double sup = 0.0, sup_se = 0.0;
    smoothed_sup(catalog, std_samples, identity, t, prob, &sup, &sup_se);
    SteinCheckRow row;
    row.check = "convex_smoothing_bound";
    row.lhs = dconvex.value;
    row.rhs = (4.0 / 3.0) * sup +
              (20.0 / std::sqrt(kPi)) * static_cast<double>(m) * m * std::sqrt(t) / (1.0 - t);
    row.margin = row.rhs - row.lhs;
    row.se = dconvex.std_error + (4.0 / 3.0) * sup_se;
    row.pass = row.lhs <= row.rhs + 3.0 * row.se;
    return row;
}

std::vector<SteinCheckRow> check_gaussian_stripe_bound(const std::vector<double>& widths) {
    std::vector<SteinCheckRow> rows;
    for (double w : widths) {
        if (!(w > 0.0)) throw domain_error("stripe width must be positive");
        SteinCheckRow r;
        r.check = "gaussian_stripe_w" + fmt_g17(w);
        r.lhs = 2.0 * normal_cdf(w) - 1.0;  // exact sup over center offsets
        r.rhs = std::sqrt(2.0 / kPi) * w;
        r.margin = r.rhs - r.lhs;
        r.se = 0.0;
        r.pass = r.lhs <= r.rhs;
        rows.push_back(r);
    }
    return rows;
}

std::vector<SteinCheckRow> check_boundary_proximity(int m, double alpha, long n_draws,
                                                    std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw domain_error("boundary proximity needs alpha in (0, 1)");
    if (m < 1 || n_draws < 2) throw domain_error("boundary proximity needs m >= 1 and draws");
    std::vector<std::pair<std::string, TestFunction>> shapes;
    {
        std::vector<double> e1(m, 0.0);
        e1[0] = 1.0;
        shapes.emplace_back("halfspace", TestFunction::halfspaces({e1}, {0.0}));
        shapes.emplace_back("ball",
                            TestFunction::ball(std::vector<double>(m, 0.0), std::sqrt(m)));
        shapes.emplace_back("box", TestFunction::axis_box(std::vector<double>(m, -1.0),
                                                          std::vector<double>(m, 1.0)));
    }
    const double rhs =
        1.0 + 2.0 * std::sqrt(2.0 / kPi) * std::pow(static_cast<double>(m), 1.5) * alpha /
                  (1.0 - alpha);
    std::vector<SteinCheckRow> rows;
    std::vector<double> z(m), reps(n_draws);
    for (const auto& [name, shape] : shapes) {
        RngStream g = RngStream(seed).sub(stream_tag::kChecks, 3);
        for (long r = 0; r < n_draws; ++r) {
            for (int j = 0; j < m; ++j) z[j] = g.next_normal();
            const double d = shape.boundary_distance(z.data());
            reps[r] = std::pow(std::max(d, 1e-300), -alpha);
        }
        const Estimate e = make_estimate(reps, seed);
        SteinCheckRow row;
        row.check = "boundary_proximity_" + name;
        row.lhs = e.value;
        row.rhs = rhs;
        row.margin = row.rhs - row.lhs;
        row.se = e.std_error;
        row.pass = row.lhs <= row.rhs + 3.0 * row.se;
        rows.push_back(row);
    }
    return rows;
}

SteinCheckRow check_hessian_null_integral(const GaussianTarget& target, long n_draws,
                                          std::uint64_t seed) {
    target.require_positive_definite("hessian null integral");
    if (n_draws < 2) throw domain_error("hessian null integral needs draws");
    const int m = target.m();
    const Matrix& Sinv = target.inv_sqrt();
    const Matrix& inv = target.inverse();
    RngStream g = RngStream(seed).sub(stream_tag::kChecks, 4);
    std::vector<std::vector<double>> reps(static_cast<std::size_t>(m) * m,
                                          std::vector<double>(n_draws));
    std::vector<double> zeta(m), w(m);
    for (long r = 0; r < n_draws; ++r) {
        for (int j = 0; j < m; ++j) zeta[j] = g.next_normal();
        for (int i = 0; i < m; ++i) {
            double v = 0.0;
            for (int j = 0; j < m; ++j) v += Sinv(i, j) * zeta[j];
            w[i] = v;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                reps[static_cast<std::size_t>(i) * m + j][r] = w[i] * w[j] - inv(i, j);
    }
    double worst = 0.0, worst_se = 0.0;
    for (auto& v : reps) {
        const Estimate e = make_estimate(v, seed);
        if (std::fabs(e.value) > worst) {
            worst = std::fabs(e.value);
            worst_se = e.std_error;
        }
    }
    SteinCheckRow row;
    row.check = "hessian_null_integral";
    row.lhs = worst;
    row.rhs = 3.0 * worst_se;
    row.margin = row.rhs - row.lhs;
    row.se = worst_se;
    row.pass = row.lhs <= row.rhs;
    return row;
}

SteinCheckRow check_conjugation(const TestFunction& h, const GaussianTarget& target, double t,
                                const std::vector<double>& y, const QuadratureSpec& spec) {
    if (h.kind() != TestFunction::Kind::halfspaces)
        throw domain_error("conjugation check needs half-space regions");
    target.require_positive_definite("conjugation check");
    const int m = target.m();
    const Matrix& S = target.sqrt();
    const Matrix& Sinv = target.inv_sqrt();

    // h o S stays a half-space intersection: <u, S x> = <S u, x>.
    std::vector<std::vector<double>> dirs;
    std::vector<double> offsets;
    for (int k = 0; k < h.n_halfspaces(); ++k) {
        std::vector<double> su(m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) su[i] += S(i, j) * h.directions()[k][j];
        double norm = 0.0;
        for (double v : su) norm += v * v;
        norm = std::sqrt(norm);
        if (norm < 1e-154) throw domain_error("conjugation check hit a degenerate direction");
        for (double& v : su) v /= norm;
        dirs.push_back(std::move(su));
        offsets.push_back(h.offsets()[k] / norm);
    }
    const TestFunction h_conj = TestFunction::halfspaces(std::move(dirs), std::move(offsets));

    std::vector<double> y_hat(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) y_hat[i] += Sinv(i, j) * y[j];

    const SteinSolution f_sigma(h, target, t, spec);
    const SteinSolution f_identity(h_conj, GaussianTarget(Matrix::identity(m)), t, spec);
    const Estimate a = f_sigma.value(y);
    const Estimate b = f_identity.value(y_hat);

    SteinCheckRow row;
    row.check = "conjugation_identity";
    row.lhs = std::fabs(a.value - b.value);
    row.rhs = std::max(1e-8, 3.0 * (a.std_error + b.std_error));
    row.margin = row.rhs - row.lhs;
    row.se = a.std_error + b.std_error;
    row.pass = row.lhs <= row.rhs;
    return row;
}

}  // namespace poincare
