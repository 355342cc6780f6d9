#pragma once

#include <string>
#include <vector>

#include "poincare/common.hpp"

namespace poincare {

// Indicator of a closed convex region: an intersection of half-spaces
// {<u_i, x> <= z_i}, a closed ball, or an axis-aligned box. These are the
// test functions of the distance classes and the inputs smoothed by the
// Stein machinery.
class TestFunction {
  public:
    enum class Kind { halfspaces, ball, axis_box };

    static TestFunction halfspaces(std::vector<std::vector<double>> directions,
                                   std::vector<double> offsets);
    static TestFunction ball(std::vector<double> center, double radius);
    static TestFunction axis_box(std::vector<double> lo, std::vector<double> hi);

    Kind kind() const { return kind_; }
    int m() const { return m_; }
    int n_halfspaces() const { return static_cast<int>(offsets_.size()); }
    const std::vector<std::vector<double>>& directions() const { return directions_; }
    const std::vector<double>& offsets() const { return offsets_; }
    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }

    bool evaluate(const double* x) const;
    bool evaluate(const std::vector<double>& x) const;

    // Region {x : scale * x + shift inside this region}; stays in the same
    // family, which is what makes smoothed expectations exact Gaussian
    // region probabilities.
    TestFunction affine_preimage(double scale, const std::vector<double>& shift) const;

    // Exact Euclidean distance to the region boundary. Available for single
    // half-spaces, balls, and axis boxes; intersections of two or more
    // half-spaces have no closed form here and throw.
    double boundary_distance(const double* x) const;
    bool has_boundary_distance() const;

    // Witness text format: kind;<shape numbers>;<shape numbers> with %.17g
    // fields, replayable byte-exactly.
    std::string serialize() const;
    static TestFunction deserialize(const std::string& text);

  private:
    TestFunction() = default;
    Kind kind_ = Kind::halfspaces;
    int m_ = 0;
    std::vector<std::vector<double>> directions_;
    std::vector<double> offsets_;
    std::vector<double> center_;
    double radius_ = 0.0;
    std::vector<double> lo_, hi_;
};

}  // namespace poincare
