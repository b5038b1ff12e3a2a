#pragma once

#include <cmath>
#include <limits>

#include "prodtail/logspace.hpp"

// Normal density / CDF / survival function with a log-space far-tail branch.
// The far tail (z beyond ~8) switches from erfc to log phi(z) + log R(z),
// where the Mills ratio R(z) is evaluated by its continued fraction
//   R(z) = 1/(z + 1/(z + 2/(z + 3/(z + ...)))),
// which stays accurate long after erfc underflows.

namespace prodtail {

inline constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
inline constexpr double sqrt_half = 0.70710678118654752440084436210485;

inline double norm_log_pdf(double z) { return -0.5 * z * z - half_log_two_pi; }

inline double norm_pdf(double z) { return std::exp(norm_log_pdf(z)); }

namespace detail {

// Mills ratio by modified Lentz on the Gauss continued fraction.
inline double mills_ratio_cf(double z) {
    const double tiny = 1e-300;
    const double eps = 1e-17;
    double f = z;
    double c = f;
    double d = 0.0;
    for (int k = 1; k <= 512; ++k) {
        const double ak = static_cast<double>(k);
        d = z + ak * d;
        if (d == 0.0) d = tiny;
        c = z + ak / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return 1.0 / f;
}

}  // namespace detail

// P(Z > z) for Z standard normal.
inline double norm_sf(double z) {
    if (std::isinf(z)) return z > 0.0 ? 0.0 : 1.0;
    if (z < 37.0) return 0.5 * std::erfc(z * sqrt_half);
    return std::exp(norm_log_pdf(z) + std::log(detail::mills_ratio_cf(z)));
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * sqrt_half); }

// log P(Z > z); safe for arbitrarily deep z (no underflow until z^2/2
// itself overflows, i.e. z ~ 1e154).
inline double norm_log_sf(double z) {
    if (std::isinf(z)) return z > 0.0 ? neg_inf : 0.0;
    if (z < 8.0) return std::log(0.5 * std::erfc(z * sqrt_half));
    return norm_log_pdf(z) + std::log(detail::mills_ratio_cf(z));
}

inline double norm_log_cdf(double z) { return norm_log_sf(-z); }

}  // namespace prodtail
