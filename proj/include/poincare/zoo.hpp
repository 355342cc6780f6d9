#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "poincare/booleangrid.hpp"
#include "poincare/gamma.hpp"
#include "poincare/matrix.hpp"
#include "poincare/model.hpp"
#include "poincare/space.hpp"

namespace poincare {

// Scaled sum of i.i.d. centered increments carried as marks: each process
// point contributes mark / sqrt(s).
class CompoundSumModel : public FunctionalModel {
  public:
    CompoundSumModel(int m, double s);
    int m() const override { return m_; }
    std::string descriptor() const override;
    void evaluate(const PointConfiguration& eta, double* out) const override;
    double s() const { return s_; }

  private:
    int m_;
    double s_;
};

// First-order integral functional: sum of kernel values over points minus
// the exact intensity integral (analytically centered).
class WienerItoModel : public FunctionalModel {
  public:
    using Kernel = std::function<double(const double*)>;
    // kernel_integrals[c] must equal the integral of kernels[c] * density
    // over the carrier box (without the scale factor s).
    WienerItoModel(std::vector<Kernel> kernels, CarrierSpace carrier,
                   std::vector<double> kernel_integrals);
    int m() const override { return static_cast<int>(kernels_.size()); }
    std::string descriptor() const override;
    void evaluate(const PointConfiguration& eta, double* out) const override;
    double kernel_value(int c, const double* x) const { return kernels_[static_cast<std::size_t>(c)](x); }

  private:
    std::vector<Kernel> kernels_;
    CarrierSpace carrier_;
    std::vector<double> integrals_;
};

// (isolated point count, pair count at range r) / sqrt(s) on the unit
// square, with interaction radius r = sqrt(theta / s).
class IsolatedCountModel : public FunctionalModel {
  public:
    IsolatedCountModel(double s, double theta);
    int m() const override { return 2; }
    std::string descriptor() const override;
    void evaluate(const PointConfiguration& eta, double* out) const override;
    double radius() const { return radius_; }

  private:
    double s_;
    double radius_;
};

// Intrinsic volumes of a union of random disks clipped to [0,L]^2, scaled
// by 1 / sqrt(area(window)). Points live on the r_max-dilated box so grains
// centered outside the window still contribute.
class BooleanDiskModel : public FunctionalModel {
  public:
    BooleanDiskModel(double window, double r_min, double r_max);
    int m() const override { return 3; }
    std::string descriptor() const override;
    void evaluate(const PointConfiguration& eta, double* out) const override;
    double window() const { return window_; }
    double pixel() const { return pixel_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    std::vector<Disk> disks_of(const PointConfiguration& eta) const;

  private:
    double window_, r_min_, r_max_, pixel_;
};

// One ready-to-run model: functional + carrier + marks + Gaussian target.
struct ZooEntry {
    std::string id;
    std::shared_ptr<FunctionalModel> model;
    CarrierSpace carrier = CarrierSpace::unit_interval(1.0);
    std::optional<MarkSpace> marks;
    Matrix sigma = Matrix::identity(1);  // analytic when available, else calibrated
    bool sigma_estimated = false;        // true when sigma (and means) come from a
                                         // calibration pass with its own seed
    double s = 0.0;
    const MarkSpace* marks_ptr() const { return marks ? &*marks : nullptr; }
};

struct ZooParams {
    double theta = 1.0;              // isolated-point interaction constant
    double boolean_intensity = 40.0; // grain centers per unit area
    double r_min = 0.05, r_max = 0.1;
    long calibration_n = 2000;
    std::uint64_t calibration_seed = 777;
};

// The scale s always means the expected number of process points. For
// boolean_disk the window side follows as L = sqrt(s / intensity), so window
// doublings can be requested through s = intensity * L^2.
const std::vector<std::string>& zoo_ids();
ZooEntry make_zoo_model(const std::string& id, double s, const ZooParams& params = {});

// Literal re-render first difference of the raw (unscaled) intrinsic-volume
// vector for one extra grain.
IntrinsicVolumes boolean_diff1(const BooleanDiskModel& model, const PointConfiguration& eta,
                               const Disk& grain);

// Empirical constant for the local moment bound: worst sampled ratio
// (E|D V_i|^k)^{1/k} / wills(grain) over grains fully inside the window,
// per requested order k.
struct LocalMomentRow {
    int order = 0;
    double c_hat = 0.0;
};
struct LocalMomentReport {
    std::vector<LocalMomentRow> rows;
    double spread() const;  // max c_hat / min c_hat over orders
};
LocalMomentReport check_local_moment_bounds(const ZooEntry& boolean_entry,
                                            const std::vector<int>& orders,
                                            const NestedMcPlan& plan);

}  // namespace poincare
