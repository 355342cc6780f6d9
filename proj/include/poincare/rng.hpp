#pragma once

#include <cstdint>
#include <vector>

#include "poincare/common.hpp"

namespace poincare {

// Counter-based random stream: output i is a hash of (derived key, i), so a
// stream is a pure value and replicate r of estimator e can always use
// stream(root).sub(e).sub(r) with no coordination between workers.
// Same (root_seed, stream path) -> bit-identical draws.
class RngStream {
  public:
    RngStream() : key_(0x9e3779b97f4a7c15ull) {}
    explicit RngStream(std::uint64_t root_seed) { key_ = mix(root_seed + kPhi); }

    // Derived, statistically independent sub-stream.
    RngStream sub(std::uint64_t stream_id) const {
        RngStream s;
        s.key_ = mix(key_ ^ mix(stream_id + kPhi));
        return s;
    }
    RngStream sub(std::uint64_t a, std::uint64_t b) const { return sub(a).sub(b); }
    RngStream sub(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
        return sub(a).sub(b).sub(c);
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kPhi); }

    // Uniform in [0,1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1), never exactly 0 (safe for quantile transforms / logs).
    double next_uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_uniform(double a, double b) { return a + (b - a) * next_uniform(); }

    // Standard normal via Box-Muller (cosine branch; two uniforms per draw,
    // no state carried between calls).
    double next_normal() {
        double u1 = next_uniform_open();
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Exact Poisson draw; inversion for small means, transformed rejection
    // (Hormann's PTRD) for large means.
    long next_poisson(double mean);

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // multiply-shift; bias < 2^-64, irrelevant at MC scale
        return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

  private:
    static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ull;
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Fixed stream-id tags so estimator seeds are stable across code motion.
namespace stream_tag {
constexpr std::uint64_t kSampler = 1;
constexpr std::uint64_t kGamma1 = 11;
constexpr std::uint64_t kGamma3 = 13;
constexpr std::uint64_t kGamma4 = 14;
constexpr std::uint64_t kGamma5 = 15;
constexpr std::uint64_t kBigGamma = 16;
constexpr std::uint64_t kCovariance = 17;
constexpr std::uint64_t kEnergy = 18;
constexpr std::uint64_t kAssumptions = 19;
constexpr std::uint64_t kDistance = 21;
constexpr std::uint64_t kGaussProb = 22;
constexpr std::uint64_t kStein = 31;
constexpr std::uint64_t kSmooth = 32;
constexpr std::uint64_t kChecks = 41;
constexpr std::uint64_t kCalibration = 51;
constexpr std::uint64_t kProbe = 61;
constexpr std::uint64_t kMarks = 62;
}  // namespace stream_tag

}  // namespace poincare
