#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace prodtail {

enum class Method {
    theorem1,
    saddle_sum,
    quadrature,
    mc_plain,
    mc_importance,
};

inline const char* method_name(Method m) {
    switch (m) {
        case Method::theorem1: return "theorem1";
        case Method::saddle_sum: return "saddle_sum";
        case Method::quadrature: return "quadrature";
        case Method::mc_plain: return "mc_plain";
        case Method::mc_importance: return "mc_importance";
    }
    return "unknown";
}

inline std::optional<Method> method_from_name(const std::string& name) {
    if (name == "theorem1") return Method::theorem1;
    if (name == "saddle_sum") return Method::saddle_sum;
    if (name == "quadrature") return Method::quadrature;
    if (name == "mc_plain") return Method::mc_plain;
    if (name == "mc_importance") return Method::mc_importance;
    return std::nullopt;
}

// A tail probability in log space. The linear value is materialized only
// when it does not underflow. Asymptotic methods may exceed 1 far outside
// their regime; that is reported, not clamped.
struct TailEstimate {
    double log_p = 0.0;
    std::optional<double> p;
    Method method = Method::theorem1;
    std::optional<double> stderr_linear;     // MC only, absent when underflowed
    std::optional<double> stderr_rel;        // MC only, stderr / p-hat
    std::optional<double> rel_accuracy;      // quadrature error estimate
    std::optional<std::uint64_t> n_samples;  // MC only
    std::optional<std::uint64_t> seed;       // MC only
};

inline constexpr double linear_underflow_log = -708.0;

inline TailEstimate make_estimate(double log_p, Method method) {
    TailEstimate e;
    e.log_p = log_p;
    e.method = method;
    if (log_p > linear_underflow_log) e.p = std::exp(log_p);
    return e;
}

}  // namespace prodtail
