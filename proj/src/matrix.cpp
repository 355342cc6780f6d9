#include "poincare/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace poincare {

Matrix Matrix::transpose() const {
    Matrix t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    Matrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < n_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

std::vector<double> Matrix::operator*(const std::vector<double>& v) const {
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    Matrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j) - rhs(i, j);
    return out;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::fabs(x));
    return m;
}

double Matrix::max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

EigenDecomposition symmetric_eigen(const Matrix& input) {
    const int n = input.n();
    if (!input.is_symmetric(1e-12 * std::max(1.0, input.max_abs()))) {
        std::ostringstream os;
        os << "symmetric_eigen: input not symmetric, max |a_ij - a_ji| = "
           << input.max_asymmetry();
        throw domain_error(os.str());
    }
    Matrix a = input;
    Matrix v = Matrix::identity(n);
    const double scale = std::max(1.0, a.max_abs());

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > 1e-14 * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double h = t * apq;
                a(p, p) -= h;
                a(q, q) += h;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j != p && j != q) {
                        const double ajp = a(j, p), ajq = a(j, q);
                        a(j, p) = ajp - s * (ajq + ajp * tau);
                        a(p, j) = a(j, p);
                        a(j, q) = ajq + s * (ajp - ajq * tau);
                        a(q, j) = a(j, q);
                    }
                    const double vjp = v(j, p), vjq = v(j, q);
                    v(j, p) = vjp - s * (vjq + vjp * tau);
                    v(j, q) = vjq + s * (vjp - vjq * tau);
                }
            }
        }
    }

    EigenDecomposition out;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = a(i, i);
    // sort ascending, permuting eigenvector columns along
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return out.values[static_cast<std::size_t>(x)] < out.values[static_cast<std::size_t>(y)];
    });
    std::vector<double> sorted(static_cast<std::size_t>(n));
    Matrix vs(n);
    for (int k = 0; k < n; ++k) {
        sorted[static_cast<std::size_t>(k)] = out.values[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        for (int i = 0; i < n; ++i) vs(i, k) = v(i, order[static_cast<std::size_t>(k)]);
    }
    out.values = std::move(sorted);
    out.vectors = std::move(vs);
    return out;
}

namespace {

Matrix from_eigen(const EigenDecomposition& e, const std::vector<double>& f) {
    const int n = e.vectors.n();
    Matrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += e.vectors(i, k) * f[static_cast<std::size_t>(k)] * e.vectors(j, k);
            out(i, j) = s;
        }
    return out;
}

}  // namespace

GaussianTarget::GaussianTarget(const Matrix& sigma) : sigma_(sigma) {
    if (!sigma.is_symmetric(1e-12 * std::max(1.0, sigma.max_abs()))) {
        std::ostringstream os;
        os << "GaussianTarget: sigma not symmetric (max asymmetry "
           << sigma.max_asymmetry() << ")";
        throw domain_error(os.str());
    }
    eigen_ = symmetric_eigen(sigma);
    const double min_eig = eigen_.values.front();
    const double max_eig = eigen_.values.back();
    if (min_eig < -1e-12 * std::max(1.0, std::fabs(max_eig))) {
        std::ostringstream os;
        os << "GaussianTarget: matrix is indefinite, eigenvalue " << min_eig << " < 0";
        throw domain_error(os.str());
    }
    op_norm_ = std::max(std::fabs(min_eig), std::fabs(max_eig));
    positive_definite_ = min_eig > 1e-10;

    const int n = sigma.n();
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        sq[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(0.0, eigen_.values[static_cast<std::size_t>(i)]));
    sqrt_ = from_eigen(eigen_, sq);
    if (positive_definite_) {
        std::vector<double> isq(static_cast<std::size_t>(n)), inv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            isq[static_cast<std::size_t>(i)] = 1.0 / sq[static_cast<std::size_t>(i)];
            inv[static_cast<std::size_t>(i)] = 1.0 / eigen_.values[static_cast<std::size_t>(i)];
        }
        inv_sqrt_ = from_eigen(eigen_, isq);
        inverse_ = from_eigen(eigen_, inv);
    }
}

double GaussianTarget::inv_op_norm() const {
    require_positive_definite("inv_op_norm");
    return 1.0 / eigen_.values.front();
}

const Matrix& GaussianTarget::inv_sqrt() const {
    require_positive_definite("inv_sqrt");
    return inv_sqrt_;
}

const Matrix& GaussianTarget::inverse() const {
    require_positive_definite("inverse");
    return inverse_;
}

void GaussianTarget::require_positive_definite(const std::string& where) const {
    if (!positive_definite_) {
        std::ostringstream os;
        os << where << ": covariance must be positive definite (min eigenvalue "
           << eigen_.values.front() << ")";
        throw domain_error(os.str());
    }
}

}  // namespace poincare
