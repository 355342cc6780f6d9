#pragma once

#include <string>
#include <vector>

#include "poincare/common.hpp"

namespace poincare {

// Dense square matrix, row major. All uses here are small (m <= ~10).
class Matrix {
  public:
    Matrix() : n_(0) {}
    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}
    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix diagonal(const std::vector<double>& d) {
        Matrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int n() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    Matrix transpose() const;
    Matrix operator*(const Matrix& rhs) const;
    std::vector<double> operator*(const std::vector<double>& v) const;
    Matrix operator-(const Matrix& rhs) const;

    double max_abs() const;
    double max_asymmetry() const;  // max |a_ij - a_ji|
    bool is_symmetric(double tol = 1e-12) const { return max_asymmetry() <= tol; }

  private:
    int n_;
    std::vector<double> a_;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors, orthonormal
};

// Cyclic Jacobi rotations; converges to off-diagonal Frobenius norm <= 1e-14
// relative to the matrix scale. Input must be symmetric.
EigenDecomposition symmetric_eigen(const Matrix& m);

// Covariance target N(0, sigma) with the cached decompositions every bound
// and every Stein kernel needs.
class GaussianTarget {
  public:
    // Requires symmetric input with eigenvalues >= -1e-12; throws otherwise,
    // naming the offending entry/eigenvalue. Positive-definite flag is set
    // iff the smallest eigenvalue exceeds 1e-10.
    explicit GaussianTarget(const Matrix& sigma);

    int m() const { return sigma_.n(); }
    const Matrix& sigma() const { return sigma_; }
    const EigenDecomposition& eigen() const { return eigen_; }
    bool positive_definite() const { return positive_definite_; }

    double op_norm() const { return op_norm_; }          // max eigenvalue magnitude
    double inv_op_norm() const;                          // 1/min eigenvalue; PD only
    const Matrix& sqrt() const { return sqrt_; }
    const Matrix& inv_sqrt() const;                      // PD only
    const Matrix& inverse() const;                       // PD only

    // Requires positive definiteness, used by the d2/dHl/dconvex assemblies.
    void require_positive_definite(const std::string& where) const;

  private:
    Matrix sigma_;
    EigenDecomposition eigen_;
    bool positive_definite_ = false;
    double op_norm_ = 0.0;
    Matrix sqrt_, inv_sqrt_, inverse_;
};

}  // namespace poincare
