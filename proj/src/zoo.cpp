#include "poincare/zoo.hpp"

#include <algorithm>
#include <cmath>

#include "poincare/difference.hpp"
#include "poincare/sampler.hpp"

namespace poincare {

CompoundSumModel::CompoundSumModel(int m, double s) : m_(m), s_(s) {
    if (m < 1) throw config_error("compound sum needs at least one component");
    if (!(s > 0)) throw config_error("compound sum scale must be positive");
}

std::string CompoundSumModel::descriptor() const {
    return "compound_sum(m=" + std::to_string(m_) + ",s=" + std::to_string(s_) + ")";
}

void CompoundSumModel::evaluate(const PointConfiguration& eta, double* out) const {
    const double inv = 1.0 / std::sqrt(s_);
    for (int c = 0; c < m_; ++c) out[c] = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double* mk = eta.mark(i);
        for (int c = 0; c < m_; ++c) out[c] += mk[c];
    }
    for (int c = 0; c < m_; ++c) out[c] *= inv;
}

WienerItoModel::WienerItoModel(std::vector<Kernel> kernels, CarrierSpace carrier,
                               std::vector<double> kernel_integrals)
    : kernels_(std::move(kernels)), carrier_(std::move(carrier)),
      integrals_(std::move(kernel_integrals)) {
    if (kernels_.empty()) throw config_error("need at least one kernel");
    if (integrals_.size() != kernels_.size())
        throw config_error("one kernel integral per kernel required");
}

std::string WienerItoModel::descriptor() const {
    return "first_order_integral(m=" + std::to_string(m()) + ")";
}

void WienerItoModel::evaluate(const PointConfiguration& eta, double* out) const {
    const auto mm = kernels_.size();
    for (std::size_t c = 0; c < mm; ++c) out[c] = -carrier_.s() * integrals_[c];
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double* x = eta.point(i);
        for (std::size_t c = 0; c < mm; ++c) out[c] += kernels_[c](x);
    }
}

IsolatedCountModel::IsolatedCountModel(double s, double theta) : s_(s) {
    if (!(s > 0) || !(theta > 0)) throw config_error("scale and theta must be positive");
    radius_ = std::sqrt(theta / s);
}

std::string IsolatedCountModel::descriptor() const {
    return "isolated_and_pair_counts(r=" + std::to_string(radius_) + ")";
}

void IsolatedCountModel::evaluate(const PointConfiguration& eta, double* out) const {
    const std::size_t n = eta.size();
    const double r2 = radius_ * radius_;
    long pairs = 0;
    std::vector<std::uint8_t> has_neighbor(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = eta.point(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* xj = eta.point(j);
            const double dx = xi[0] - xj[0], dy = xi[1] - xj[1];
            if (dx * dx + dy * dy <= r2) {
                ++pairs;
                has_neighbor[i] = has_neighbor[j] = 1;
            }
        }
    }
    long isolated = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!has_neighbor[i]) ++isolated;
    const double inv = 1.0 / std::sqrt(s_);
    out[0] = static_cast<double>(isolated) * inv;
    out[1] = static_cast<double>(pairs) * inv;
}

BooleanDiskModel::BooleanDiskModel(double window, double r_min, double r_max)
    : window_(window), r_min_(r_min), r_max_(r_max) {
    if (!(window > 0)) throw config_error("window size must be positive");
    if (!(r_min > 0) || !(r_max >= r_min)) throw config_error("need 0 < r_min <= r_max");
    pixel_ = std::min(0.005 * window, r_min / 10.0);
}

std::string BooleanDiskModel::descriptor() const {
    return "boolean_disk_volumes(L=" + std::to_string(window_) + ")";
}

std::vector<Disk> BooleanDiskModel::disks_of(const PointConfiguration& eta) const {
    std::vector<Disk> disks(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double* x = eta.point(i);
        disks[i] = Disk{x[0], x[1], eta.mark(i)[0]};
    }
    return disks;
}

void BooleanDiskModel::evaluate(const PointConfiguration& eta, double* out) const {
    const IntrinsicVolumes v = intrinsic_volumes_2d(disks_of(eta), window_, pixel_);
    const double inv = 1.0 / window_;  // 1 / sqrt(area of window)
    out[0] = v.v0 * inv;
    out[1] = v.v1 * inv;
    out[2] = v.v2 * inv;
}

namespace {

// Mean and covariance calibration pass used where no closed form exists;
// runs on its own seed so later experiments stay independent of it.
void calibrate(ZooEntry& entry, long n, std::uint64_t seed) {
    const auto m = static_cast<std::size_t>(entry.model->m());
    RngStream root(seed);
    std::vector<std::vector<double>> vals(m, std::vector<double>(static_cast<std::size_t>(n)));
    for (long r = 0; r < n; ++r) {
        RngStream rep = root.sub(stream_tag::kCalibration, static_cast<std::uint64_t>(r));
        PointConfiguration eta = sample_poisson_process(entry.carrier, entry.marks_ptr(), rep);
        std::vector<double> v = entry.model->value(eta);
        for (std::size_t c = 0; c < m; ++c) vals[c][static_cast<std::size_t>(r)] = v[c];
    }
    std::vector<double> mean(m);
    for (std::size_t c = 0; c < m; ++c) mean[c] = pairwise_sum(vals[c]) / static_cast<double>(n);
    Matrix sigma = Matrix::identity(static_cast<int>(m));
    std::vector<double> prod(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r)
                prod[r] = (vals[i][r] - mean[i]) * (vals[j][r] - mean[j]);
            const double cij = pairwise_sum(prod) / static_cast<double>(n - 1);
            sigma(static_cast<int>(i), static_cast<int>(j)) = cij;
            sigma(static_cast<int>(j), static_cast<int>(i)) = cij;
        }
    }
    entry.model->set_mean_vector(std::move(mean));
    entry.sigma = std::move(sigma);
    entry.sigma_estimated = true;
}

MarkSpace rademacher_marks(int m) {
    MarkSpace ms;
    ms.mark_dim = m;
    ms.description = "independent +1/-1 signs";
    ms.sampler = [m](RngStream& rng, double* out) {
        for (int c = 0; c < m; ++c) out[c] = rng.next_uniform() < 0.5 ? -1.0 : 1.0;
    };
    return ms;
}

}  // namespace

const std::vector<std::string>& zoo_ids() {
    static const std::vector<std::string> ids{"compound_sum_rademacher", "wiener_ito_unit",
                                              "isolated_points", "boolean_disk"};
    return ids;
}

ZooEntry make_zoo_model(const std::string& id, double s, const ZooParams& params) {
    ZooEntry entry;
    entry.id = id;
    entry.s = s;
    if (id == "compound_sum_rademacher") {
        entry.model = std::make_shared<CompoundSumModel>(1, s);
        entry.carrier = CarrierSpace::unit_interval(s);
        entry.marks = rademacher_marks(1);
        entry.sigma = Matrix::identity(1);  // Cov(X) = 1 for signs
        return entry;
    }
    if (id == "wiener_ito_unit") {
        const double inv = 1.0 / std::sqrt(s);
        std::vector<WienerItoModel::Kernel> kernels{[inv](const double*) { return inv; }};
        CarrierSpace carrier = CarrierSpace::unit_interval(s);
        entry.model = std::make_shared<WienerItoModel>(std::move(kernels), carrier,
                                                       std::vector<double>{inv});
        entry.carrier = carrier;
        entry.sigma = Matrix::identity(1);  // integral of kernel^2 d(intensity) = 1
        return entry;
    }
    if (id == "isolated_points") {
        entry.model = std::make_shared<IsolatedCountModel>(s, params.theta);
        entry.carrier = CarrierSpace::unit_square(s);
        calibrate(entry, params.calibration_n, params.calibration_seed);
        return entry;
    }
    if (id == "boolean_disk") {
        // s is the expected grain count inside the window, so the side is
        // L = sqrt(s / intensity); centers land on the r_max-dilated box so
        // grains centered just outside still intersect the window.
        if (!(params.boolean_intensity > 0))
            throw config_error("boolean grain intensity must be positive");
        const double L = std::sqrt(s / params.boolean_intensity);
        entry.model = std::make_shared<BooleanDiskModel>(L, params.r_min, params.r_max);
        entry.carrier = CarrierSpace(2, {-params.r_max, -params.r_max, 0},
                                     {L + params.r_max, L + params.r_max, 0},
                                     params.boolean_intensity);
        MarkSpace ms;
        ms.mark_dim = 1;
        ms.description = "disk radius uniform on [r_min, r_max]";
        const double r0 = params.r_min, r1 = params.r_max;
        ms.sampler = [r0, r1](RngStream& rng, double* out) { out[0] = rng.next_uniform(r0, r1); };
        entry.marks = ms;
        calibrate(entry, params.calibration_n, params.calibration_seed);
        return entry;
    }
    throw config_error("unknown model id: " + id);
}

IntrinsicVolumes boolean_diff1(const BooleanDiskModel& model, const PointConfiguration& eta,
                               const Disk& grain) {
    std::vector<Disk> base = model.disks_of(eta);
    const IntrinsicVolumes v_base = intrinsic_volumes_2d(base, model.window(), model.pixel());
    base.push_back(grain);
    const IntrinsicVolumes v_aug = intrinsic_volumes_2d(base, model.window(), model.pixel());
    return IntrinsicVolumes{v_aug.v0 - v_base.v0, v_aug.v1 - v_base.v1, v_aug.v2 - v_base.v2};
}

double LocalMomentReport::spread() const {
    double lo = 0.0, hi = 0.0;
    for (const auto& row : rows) {
        if (lo == 0.0 || row.c_hat < lo) lo = row.c_hat;
        hi = std::max(hi, row.c_hat);
    }
    return lo > 0 ? hi / lo : 0.0;
}

LocalMomentReport check_local_moment_bounds(const ZooEntry& boolean_entry,
                                            const std::vector<int>& orders,
                                            const NestedMcPlan& plan) {
    auto model = std::dynamic_pointer_cast<const BooleanDiskModel>(boolean_entry.model);
    if (!model) throw domain_error("local moment bounds apply to the boolean model");
    for (int k : orders)
        if (k < 1 || k > 6) throw domain_error("moment order must lie in 1..6");

    const double L = model->window();
    RngStream root(plan.seed);
    LocalMomentReport report;
    for (int k : orders) report.rows.push_back(LocalMomentRow{k, 0.0});

    for (long r = 0; r < plan.n_outer; ++r) {
        RngStream g = root.sub(stream_tag::kChecks, 12, static_cast<std::uint64_t>(r));
        RngStream pr = g.sub(0);
        // Grain fully inside the window, so its Wills functional is exact.
        Disk grain;
        grain.r = pr.next_uniform(model->r_min(), model->r_max());
        grain.x = pr.next_uniform(model->r_max(), L - model->r_max());
        grain.y = pr.next_uniform(model->r_max(), L - model->r_max());
        const double wills = wills_functional_2d(grain.r);

        std::vector<std::vector<double>> absd(3);  // per component |D V_i|
        for (auto& v : absd) v.reserve(static_cast<std::size_t>(plan.n_inner));
        for (long kk = 0; kk < plan.n_inner; ++kk) {
            RngStream rep = g.sub(1 + static_cast<std::uint64_t>(kk));
            PointConfiguration eta =
                sample_poisson_process(boolean_entry.carrier, boolean_entry.marks_ptr(), rep);
            const IntrinsicVolumes d = boolean_diff1(*model, eta, grain);
            absd[0].push_back(std::abs(d.v0));
            absd[1].push_back(std::abs(d.v1));
            absd[2].push_back(std::abs(d.v2));
        }
        for (auto& row : report.rows) {
            for (int c = 0; c < 3; ++c) {
                std::vector<double> powed(absd[static_cast<std::size_t>(c)]);
                for (auto& v : powed) v = std::pow(v, row.order);
                const double moment = pairwise_sum(powed) / static_cast<double>(powed.size());
                const double ratio = std::pow(moment, 1.0 / row.order) / wills;
                row.c_hat = std::max(row.c_hat, ratio);
            }
        }
    }
    return report;
}

}  // namespace poincare
