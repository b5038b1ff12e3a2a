#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

// Log-space probability arithmetic. Everything tail-related in this library
// lives far below the double underflow threshold, so probabilities are
// carried as natural logs and only materialized on demand.

namespace prodtail {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == neg_inf) return a;  // covers both -inf
    return a + std::log1p(std::exp(b - a));
}

// log(exp(a) - exp(b)); requires a >= b. Returns -inf when they cancel.
inline double log_sub(double a, double b) {
    if (b == neg_inf) return a;
    if (b >= a) return neg_inf;
    return a + std::log1p(-std::exp(b - a));
}

// Ordered left-to-right log-sum-exp; the reduction order is part of the
// contract (bit-stable outputs for fixed inputs).
inline double log_sum_exp(std::span<const double> values) {
    double acc = neg_inf;
    for (double v : values) acc = log_add(acc, v);
    return acc;
}

inline double log_sum_exp(const std::vector<double>& values) {
    return log_sum_exp(std::span<const double>(values));
}

// A real number as (sign, log|value|). Used where products of signed
// quantities would overflow in linear space.
struct SignedLog {
    double log_abs = neg_inf;  // log|value|, -inf encodes zero
    int sign = 0;              // -1, 0, +1

    static SignedLog from_value(double v) {
        if (v == 0.0) return {neg_inf, 0};
        return {std::log(std::fabs(v)), v > 0.0 ? +1 : -1};
    }

    // Linear value; overflows to +/-inf and underflows to 0 as doubles do.
    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    SignedLog& operator*=(const SignedLog& o) {
        sign *= o.sign;
        log_abs = (sign == 0) ? neg_inf : log_abs + o.log_abs;
        return *this;
    }
};

// value > threshold, both given in signed-log form.
inline bool signed_log_greater(const SignedLog& value, const SignedLog& threshold) {
    if (value.sign != threshold.sign) return value.sign > threshold.sign;
    if (value.sign > 0) return value.log_abs > threshold.log_abs;
    if (value.sign < 0) return value.log_abs < threshold.log_abs;
    return false;
}

}  // namespace prodtail
