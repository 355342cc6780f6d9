#include "poincare/space.hpp"

namespace poincare {

namespace {

void validate_box(int d, const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    if (d < 1 || d > 3) throw config_error("carrier dimension must be 1, 2 or 3");
    for (int k = 0; k < d; ++k) {
        if (!(lo[static_cast<std::size_t>(k)] < hi[static_cast<std::size_t>(k)]))
            throw config_error("carrier box is empty in coordinate " + std::to_string(k));
    }
}

}  // namespace

CarrierSpace::CarrierSpace(int d, std::array<double, 3> lo, std::array<double, 3> hi, double s)
    : d_(d), lo_(lo), hi_(hi), s_(s) {
    validate_box(d, lo, hi);
    if (!(s > 0)) throw config_error("carrier scale s must be positive");
    density_integral_ = volume();
}

CarrierSpace::CarrierSpace(int d, std::array<double, 3> lo, std::array<double, 3> hi, double s,
                           Density density, double density_sup, double density_integral)
    : d_(d),
      lo_(lo),
      hi_(hi),
      s_(s),
      density_(std::move(density)),
      density_sup_(density_sup),
      density_integral_(density_integral) {
    validate_box(d, lo, hi);
    if (!(s > 0)) throw config_error("carrier scale s must be positive");
    if (density_ && !(density_sup_ > 0))
        throw config_error("a non-constant density needs a positive sup bound");
    if (!(density_integral_ > 0)) throw config_error("density integral must be positive");
}

double CarrierSpace::volume() const {
    double v = 1.0;
    for (int k = 0; k < d_; ++k) v *= hi_[static_cast<std::size_t>(k)] - lo_[static_cast<std::size_t>(k)];
    return v;
}

bool CarrierSpace::contains(const double* x) const {
    for (int k = 0; k < d_; ++k) {
        auto kk = static_cast<std::size_t>(k);
        if (x[kk] < lo_[kk] || x[kk] > hi_[kk]) return false;
    }
    return true;
}

void PointConfiguration::reserve(std::size_t n) {
    coords_.reserve(n * static_cast<std::size_t>(dim_));
    if (mark_dim_ > 0) marks_.reserve(n * static_cast<std::size_t>(mark_dim_));
}

void PointConfiguration::push(const double* x, const double* mk) {
    coords_.insert(coords_.end(), x, x + dim_);
    if (mark_dim_ > 0) {
        if (mk == nullptr) throw domain_error("mark required but missing");
        marks_.insert(marks_.end(), mk, mk + mark_dim_);
    }
    ++n_;
}

void PointConfiguration::pop() {
    if (n_ == 0) throw domain_error("pop from empty configuration");
    coords_.resize(coords_.size() - static_cast<std::size_t>(dim_));
    if (mark_dim_ > 0) marks_.resize(marks_.size() - static_cast<std::size_t>(mark_dim_));
    --n_;
}

}  // namespace poincare
