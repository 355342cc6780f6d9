#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "poincare/matrix.hpp"
#include "poincare/rng.hpp"

using namespace poincare;

TEST_CASE("eigen decomposition of a known 2x2") {
    Matrix a(2);
    a(0, 0) = 2;
    a(0, 1) = 1;
    a(1, 0) = 1;
    a(1, 1) = 2;
    const EigenDecomposition ed = symmetric_eigen(a);
    REQUIRE(ed.values.size() == 2);
    CHECK(ed.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ed.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eigen decomposition reconstructs random symmetric matrices") {
    RngStream g(5);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 5;
        Matrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = g.next_normal();
                a(i, j) = v;
                a(j, i) = v;
            }
        const EigenDecomposition ed = symmetric_eigen(a);
        Matrix lam(n);
        for (int i = 0; i < n; ++i) lam(i, i) = ed.values[static_cast<std::size_t>(i)];
        // Q Lambda Q^T = A and Q^T Q = I.
        CHECK((ed.vectors * lam * ed.vectors.transpose() - a).max_abs() < 1e-10);
        CHECK((ed.vectors.transpose() * ed.vectors - Matrix::identity(n)).max_abs() < 1e-10);
        CHECK(std::is_sorted(ed.values.begin(), ed.values.end()));
    }
}

TEST_CASE("matrix vector product") {
    Matrix a(2);
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(1, 0) = 3;
    a(1, 1) = 4;
    const std::vector<double> v = a * std::vector<double>{1.0, -1.0};
    CHECK(v[0] == doctest::Approx(-1.0));
    CHECK(v[1] == doctest::Approx(-1.0));
}

TEST_CASE("gaussian target exposes consistent spectral data") {
    Matrix sigma(2);
    sigma(0, 0) = 2;
    sigma(0, 1) = 1;
    sigma(1, 0) = 1;
    sigma(1, 1) = 2;
    const GaussianTarget t(sigma);
    CHECK(t.m() == 2);
    CHECK(t.positive_definite());
    CHECK(t.op_norm() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(t.inv_op_norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((t.sqrt() * t.sqrt() - sigma).max_abs() < 1e-12);
    CHECK((t.inv_sqrt() * t.sqrt() - Matrix::identity(2)).max_abs() < 1e-12);
    CHECK((t.inverse() * sigma - Matrix::identity(2)).max_abs() < 1e-12);
}

TEST_CASE("gaussian target rejects invalid covariance input") {
    Matrix neg(1);
    neg(0, 0) = -0.5;
    CHECK_THROWS_AS(GaussianTarget{neg}, domain_error);

    Matrix asym(2);
    asym(0, 1) = 1.0;
    asym(1, 0) = 0.0;
    asym(0, 0) = asym(1, 1) = 1.0;
    CHECK_THROWS_AS(GaussianTarget{asym}, domain_error);

    // Rank-deficient covariance is accepted but flagged, and the inverse
    // blocks refuse to exist.
    Matrix singular(2);
    singular(0, 0) = 1.0;
    singular(0, 1) = 1.0;
    singular(1, 0) = 1.0;
    singular(1, 1) = 1.0;
    const GaussianTarget t(singular);
    CHECK_FALSE(t.positive_definite());
    CHECK(t.op_norm() == doctest::Approx(2.0));
    CHECK_THROWS_AS(t.require_positive_definite("test"), domain_error);
    CHECK_THROWS_AS(t.inv_sqrt(), domain_error);
}
