#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poincare/common.hpp"
#include "poincare/rng.hpp"

namespace poincare {

// Simulation carrier: an axis-aligned box in R^d with intensity measure
// s * density(x) dx. Densities must come with an explicit sup bound for
// rejection sampling; the constant-density case needs none.
class CarrierSpace {
  public:
    using Density = std::function<double(const double*)>;

    // Constant density 1 on the box.
    CarrierSpace(int d, std::array<double, 3> lo, std::array<double, 3> hi, double s);
    // General density; `density_sup` must dominate the density on the box and
    // `density_integral` is its exact/quadrature integral over the box.
    CarrierSpace(int d, std::array<double, 3> lo, std::array<double, 3> hi, double s,
                 Density density, double density_sup, double density_integral);

    static CarrierSpace unit_interval(double s) { return {1, {0, 0, 0}, {1, 0, 0}, s}; }
    static CarrierSpace unit_square(double s) { return {2, {0, 0, 0}, {1, 1, 0}, s}; }
    static CarrierSpace box_2d(double lo0, double lo1, double hi0, double hi1, double s) {
        return {2, {lo0, lo1, 0}, {hi0, hi1, 0}, s};
    }

    int d() const { return d_; }
    double lo(int k) const { return lo_[static_cast<std::size_t>(k)]; }
    double hi(int k) const { return hi_[static_cast<std::size_t>(k)]; }
    double s() const { return s_; }
    bool constant_density() const { return !density_; }
    double density_at(const double* x) const { return density_ ? density_(x) : 1.0; }
    double density_sup() const { return density_sup_; }
    double volume() const;
    // s * integral of density over the box.
    double total_mass() const { return s_ * density_integral_; }
    double density_integral() const { return density_integral_; }
    bool contains(const double* x) const;

  private:
    int d_;
    std::array<double, 3> lo_, hi_;
    double s_;
    Density density_;
    double density_sup_ = 1.0;
    double density_integral_;
};

// i.i.d. marks attached to points, independent of everything else.
struct MarkSpace {
    int mark_dim = 0;
    std::function<void(RngStream&, double*)> sampler;
    std::string description;
};

// A finite point configuration (multiset); marks optional, flat storage.
class PointConfiguration {
  public:
    PointConfiguration() = default;
    PointConfiguration(int dim, int mark_dim) : dim_(dim), mark_dim_(mark_dim) {}

    int dim() const { return dim_; }
    int mark_dim() const { return mark_dim_; }
    std::size_t size() const { return n_; }
    const double* point(std::size_t i) const { return coords_.data() + i * dim_; }
    const double* mark(std::size_t i) const {
        return mark_dim_ == 0 ? nullptr : marks_.data() + i * mark_dim_;
    }

    void reserve(std::size_t n);
    void push(const double* x, const double* mk);
    void pop();
    void clear() {
        n_ = 0;
        coords_.clear();
        marks_.clear();
    }

    bool operator==(const PointConfiguration& o) const {
        return dim_ == o.dim_ && mark_dim_ == o.mark_dim_ && coords_ == o.coords_ &&
               marks_ == o.marks_;
    }

  private:
    int dim_ = 0;
    int mark_dim_ = 0;
    std::size_t n_ = 0;
    std::vector<double> coords_;
    std::vector<double> marks_;
};

// A candidate point (location + optional mark) used to probe difference
// operators and lambda-integrals.
struct Probe {
    std::array<double, 3> x{0, 0, 0};
    std::vector<double> mark;
};

}  // namespace poincare
