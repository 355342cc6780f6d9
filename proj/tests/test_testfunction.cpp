#include <cmath>
#include <vector>

#include "doctest.h"
#include "poincare/rng.hpp"
#include "poincare/testfunction.hpp"

using namespace poincare;

TEST_CASE("membership uses closed regions") {
    const TestFunction h = TestFunction::halfspaces({{1.0, 0.0}}, {0.5});
    CHECK(h.evaluate({0.5, 7.0}));   // boundary point belongs
    CHECK(h.evaluate({-3.0, 0.0}));
    CHECK_FALSE(h.evaluate({0.5 + 1e-12, 0.0}));

    const double r = std::sqrt(0.5);
    const TestFunction b = TestFunction::ball({1.0, 1.0}, r);
    CHECK(b.evaluate({1.5, 1.5}));  // on the sphere
    CHECK_FALSE(b.evaluate({1.5 + 1e-9, 1.5}));

    const TestFunction box = TestFunction::axis_box({0.0, -1.0}, {1.0, 1.0});
    CHECK(box.evaluate({0.0, 1.0}));  // corner
    CHECK_FALSE(box.evaluate({0.0, 1.0 + 1e-12}));

    // Two half-spaces intersect: wedge x <= 0.5 and y <= 0.
    const TestFunction wedge = TestFunction::halfspaces({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.0});
    CHECK(wedge.evaluate({0.25, -1.0}));
    CHECK_FALSE(wedge.evaluate({0.25, 0.25}));
    CHECK(wedge.n_halfspaces() == 2);

    CHECK_THROWS_AS(h.evaluate({1.0, 2.0, 3.0}), domain_error);
}

TEST_CASE("construction validates its inputs") {
    CHECK_THROWS_AS(TestFunction::halfspaces({{0.6, 0.7}}, {0.0}), domain_error);
    CHECK_THROWS_AS(TestFunction::halfspaces({{1.0}, {1.0, 0.0}}, {0.0, 0.0}), domain_error);
    CHECK_THROWS_AS(TestFunction::halfspaces({}, {}), domain_error);
    CHECK_THROWS_AS(TestFunction::ball({0.0}, 0.0), domain_error);
    CHECK_THROWS_AS(TestFunction::ball({0.0}, -1.0), domain_error);
    CHECK_THROWS_AS(TestFunction::axis_box({0.0, 0.0}, {1.0, 0.0}), domain_error);
    CHECK_THROWS_AS(TestFunction::axis_box({0.0}, {1.0, 2.0}), domain_error);
    // A rotated unit direction passes the unit-norm gate.
    const double c = std::cos(0.3), s = std::sin(0.3);
    CHECK_NOTHROW(TestFunction::halfspaces({{c, s}}, {1.0}));
}

TEST_CASE("witness text round trip is byte exact") {
    const double c = std::cos(0.3), s = std::sin(0.3);
    const std::vector<TestFunction> cases{
        TestFunction::halfspaces({{c, s}, {0.0, -1.0}}, {1.0 / 3.0, -0.125}),
        TestFunction::ball({0.1, -0.2, 0.3}, std::sqrt(2.0)),
        TestFunction::axis_box({-1.0 / 7.0}, {22.0 / 7.0}),
    };
    for (const TestFunction& f : cases) {
        const std::string text = f.serialize();
        const TestFunction g = TestFunction::deserialize(text);
        CHECK(g.serialize() == text);
        CHECK(g.kind() == f.kind());
        CHECK(g.m() == f.m());
        // Same membership on a probe cloud.
        RngStream rng(42);
        for (int k = 0; k < 200; ++k) {
            std::vector<double> x(f.m());
            for (double& xi : x) xi = rng.next_normal() * 2.0;
            CHECK(g.evaluate(x) == f.evaluate(x));
        }
    }
    CHECK_THROWS_AS(TestFunction::deserialize("ball;0,0"), config_error);
    CHECK_THROWS_AS(TestFunction::deserialize("cone;1;2"), config_error);
    CHECK_THROWS_AS(TestFunction::deserialize("ball;0,0;1,2"), config_error);
    CHECK_THROWS_AS(TestFunction::deserialize("ball;0,zebra;1"), config_error);
}

TEST_CASE("affine preimage matches pointwise composition") {
    const double c = std::cos(1.1), s = std::sin(1.1);
    const std::vector<TestFunction> cases{
        TestFunction::halfspaces({{c, s}}, {0.7}),
        TestFunction::halfspaces({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.25}),
        TestFunction::ball({0.4, -0.3}, 1.2),
        TestFunction::axis_box({-0.5, -1.5}, {0.75, 0.25}),
    };
    const double scale = 1.7;
    const std::vector<double> shift{0.3, -0.8};
    RngStream rng(7);
    for (const TestFunction& f : cases) {
        const TestFunction pre = f.affine_preimage(scale, shift);
        CHECK(pre.kind() == f.kind());
        for (int k = 0; k < 500; ++k) {
            std::vector<double> x{rng.next_normal(), rng.next_normal()};
            std::vector<double> y{scale * x[0] + shift[0], scale * x[1] + shift[1]};
            CHECK(pre.evaluate(x) == f.evaluate(y));
        }
    }
    CHECK_THROWS_AS(cases[0].affine_preimage(0.0, shift), domain_error);
    CHECK_THROWS_AS(cases[0].affine_preimage(1.0, {0.1}), domain_error);
}

TEST_CASE("boundary distance closed forms") {
    const TestFunction h = TestFunction::halfspaces({{0.6, 0.8}}, {1.0});
    // Distance from the origin to <u,x> = 1 is 1 for a unit u.
    CHECK(h.boundary_distance(std::vector<double>{0.0, 0.0}.data()) == doctest::Approx(1.0));
    CHECK(h.boundary_distance(std::vector<double>{0.6, 0.8}.data()) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.has_boundary_distance());

    const TestFunction b = TestFunction::ball({0.0, 0.0}, 2.0);
    CHECK(b.boundary_distance(std::vector<double>{3.0, 4.0}.data()) == doctest::Approx(3.0));
    CHECK(b.boundary_distance(std::vector<double>{0.5, 0.0}.data()) == doctest::Approx(1.5));

    const TestFunction box = TestFunction::axis_box({0.0, 0.0}, {4.0, 2.0});
    // Inside: nearest face. Outside a corner: Euclidean distance to it.
    CHECK(box.boundary_distance(std::vector<double>{2.0, 0.5}.data()) == doctest::Approx(0.5));
    CHECK(box.boundary_distance(std::vector<double>{7.0, 6.0}.data()) == doctest::Approx(5.0));
    CHECK(box.boundary_distance(std::vector<double>{-1.0, 1.0}.data()) == doctest::Approx(1.0));

    const TestFunction wedge = TestFunction::halfspaces({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
    CHECK_FALSE(wedge.has_boundary_distance());
    CHECK_THROWS_AS(wedge.boundary_distance(std::vector<double>{1.0, 1.0}.data()), domain_error);
}
