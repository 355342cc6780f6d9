#include "poincare/rng.hpp"

#include <cmath>

namespace poincare {

namespace {

// log(k!) for the PTRD acceptance test; exact table for small k, Stirling
// with correction series beyond.
double log_factorial(long k) {
    static const double table[] = {0.0,
                                   0.0,
                                   0.6931471805599453,
                                   1.791759469228055,
                                   3.1780538303479458,
                                   4.787491742782046,
                                   6.579251212010101,
                                   8.525161361065415,
                                   10.60460290274525,
                                   12.801827480081469};
    if (k < 10) return table[k];
    const double x = static_cast<double>(k + 1);
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return (x - 0.5) * std::log(x) - x + 0.9189385332046727 +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

}  // namespace

long RngStream::next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 12.0) {
        // Knuth inversion by uniform products.
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = next_uniform_open();
        while (prod > limit) {
            ++k;
            prod *= next_uniform_open();
        }
        return k;
    }
    // Hormann's PTRD transformed rejection.
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u;
        double v = next_uniform_open();
        if (v <= 0.86 * v_r) {
            u = v / v_r - 0.43;
            return static_cast<long>(std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + mean +
                                                0.445));
        }
        if (v >= v_r) {
            u = next_uniform_open() - 0.5;
        } else {
            u = v / v_r - 0.93;
            u = (u < 0.0 ? -0.5 : 0.5) - u;
            v = next_uniform_open() * v_r;
        }
        const double us = 0.5 - std::fabs(u);
        if (us < 0.013 && v > us) continue;
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.445);
        v = v * inv_alpha / (a / (us * us) + b);
        if (k >= 10.0) {
            if (std::log(v * smu) <=
                (k + 0.5) * std::log(mean / k) - mean - 0.9189385332046727 + k -
                    (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k) {
                return static_cast<long>(k);
            }
        } else if (k >= 0.0) {
            if (std::log(v) <= k * std::log(mean) - mean - log_factorial(static_cast<long>(k))) {
                return static_cast<long>(k);
            }
        }
    }
}

}  // namespace poincare
