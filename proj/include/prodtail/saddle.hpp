#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "prodtail/asymptotic.hpp"
#include "prodtail/estimate.hpp"
#include "prodtail/logspace.hpp"
#include "prodtail/model.hpp"
#include "prodtail/signpat.hpp"

// Exact per-pattern boundary saddle of the Gaussian exponent on the surface
// prod u_i = x within one sign orthant. The stationarity system collapses to
// one scalar unknown: every coordinate solves u^2 - mu u - sigma^2 beta = 0
// for a common beta > 0, and the orthant picks one root per coordinate. The
// product of those roots is strictly increasing in beta, so the constraint
// pins beta by a one-dimensional monotone solve.

namespace prodtail::saddle {

using signpat::SignPattern;

// Dense symmetric matrix, row-major.
struct SymMatrix {
    std::size_t dim = 0;
    std::vector<double> data;

    explicit SymMatrix(std::size_t d = 0) : dim(d), data(d * d, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return data[i * dim + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
};

// log det by Cholesky; throws when the matrix is not positive definite.
// An empty matrix has determinant 1.
inline double cholesky_log_det(SymMatrix m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.dim; ++j) {
        double pivot = m.at(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= m.at(j, k) * m.at(j, k);
        if (!(pivot > 0.0)) {
            throw Error(ErrorCode::hessian_not_pd,
                        "Cholesky pivot " + std::to_string(j) + " not positive");
        }
        const double root = std::sqrt(pivot);
        m.at(j, j) = root;
        acc += std::log(root);
        for (std::size_t i = j + 1; i < m.dim; ++i) {
            double v = m.at(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= m.at(i, k) * m.at(j, k);
            m.at(i, j) = v / root;
        }
    }
    return 2.0 * acc;
}

// The root of u^2 - mu u - sigma^2 beta = 0 with the sign of `sign`.
// When the requested root is the small-magnitude one the direct formula
// cancels, so it is recovered from the product of the roots instead.
inline double select_root(double mu, double sigma, int sign, double beta) {
    const double disc = std::sqrt(mu * mu + 4.0 * sigma * sigma * beta);
    if (mu == 0.0 || (mu > 0.0) == (sign > 0)) {
        return 0.5 * (mu + (sign > 0 ? disc : -disc));
    }
    const double dominant = 0.5 * (mu + (mu > 0.0 ? disc : -disc));
    return -(sigma * sigma * beta) / dominant;
}

// g_s(beta) = prod_i u_i(beta), in sign-and-log form. Positive for every
// admissible pattern and beta > 0 (no root ever vanishes).
inline SignedLog product_at(const ProductModel& model, const SignPattern& s, double beta) {
    if (s.size() != model.n()) {
        throw Error(ErrorCode::length_mismatch, "pattern length does not match model size");
    }
    SignedLog out{0.0, +1};
    for (std::size_t i = 0; i < model.n(); ++i) {
        const double u = select_root(model.mu[i], model.sigma[i], s[i], beta);
        out.log_abs += std::log(std::fabs(u));
        if (u < 0.0) out.sign = -out.sign;
    }
    return out;
}

struct SaddlePoint {
    SignPattern pattern;
    double x = 0.0;
    double beta = 0.0;               // common scalar of the stationarity system
    std::vector<double> coords;      // minimizer u, one entry per factor
    double exponent = 0.0;           // Gaussian exponent at the minimizer
    double exponent_slope = 0.0;     // d exponent / d threshold, exact form
    double log_prefactor = 0.0;      // log A_s
    SymMatrix hessian;               // (n-1) x (n-1) reduced Hessian
};

// Reduced Hessian of the constrained exponent at the solved coordinates,
// in the first n-1 variables with the last eliminated by the constraint.
inline SymMatrix hessian_at(const ProductModel& model, std::span<const double> coords) {
    const std::size_t n = model.n();
    for (std::size_t i = 0; i < n; ++i) {
        if (coords[i] == 0.0) {
            throw Error(ErrorCode::degenerate_coordinate,
                        "coordinate " + std::to_string(i) + " vanished");
        }
    }
    SymMatrix h(n - 1);
    if (n == 1) return h;
    const double un = coords[n - 1];
    const double mun = model.mu[n - 1];
    const double sn2 = model.sigma[n - 1] * model.sigma[n - 1];
    const double cross = (2.0 * un * un - mun * un) / sn2;
    const double diag = (3.0 * un * un - 2.0 * mun * un) / sn2;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (i == j) {
                h.at(i, i) = 1.0 / (model.sigma[i] * model.sigma[i]) + diag / (coords[i] * coords[i]);
            } else {
                h.at(i, j) = cross / (coords[i] * coords[j]);
            }
        }
    }
    return h;
}

// log A_s = ((n-1)/2) log(2 pi) - sum_{i<n} log|u_i| - (1/2) log det H.
inline double log_prefactor_a(const ProductModel& model, std::span<const double> coords,
                              const SymMatrix& hessian) {
    const std::size_t n = model.n();
    double log_jacobian = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) log_jacobian += std::log(std::fabs(coords[i]));
    const double d = static_cast<double>(n - 1);
    return 0.5 * d * std::log(2.0 * asymptotic::pi) - log_jacobian - 0.5 * cholesky_log_det(hessian);
}

namespace detail {

// Gaussian exponent sum (u_i^2 / 2 sigma_i^2 - mu_i u_i / sigma_i^2).
inline double gaussian_exponent(const ProductModel& model, std::span<const double> coords) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.n(); ++i) {
        const double s2 = model.sigma[i] * model.sigma[i];
        acc += coords[i] * coords[i] / (2.0 * s2) - model.mu[i] * coords[i] / s2;
    }
    return acc;
}

// log g_s(beta) - log x and its beta-derivative.
struct LogGap {
    double value;
    double slope;
};

inline LogGap log_gap(const ProductModel& model, const SignPattern& s, double beta, double log_x) {
    double log_prod = 0.0;
    double slope = 0.0;
    for (std::size_t i = 0; i < model.n(); ++i) {
        const double sigma2 = model.sigma[i] * model.sigma[i];
        const double u = select_root(model.mu[i], model.sigma[i], s[i], beta);
        const double disc = std::sqrt(model.mu[i] * model.mu[i] + 4.0 * sigma2 * beta);
        log_prod += std::log(std::fabs(u));
        slope += sigma2 / (std::fabs(u) * disc);
    }
    return {log_prod - log_x, slope};
}

// Limit of g_s as beta -> 0+: the product of |mu_i| when every sign matches
// its nonzero mean, otherwise 0.
inline SignedLog product_floor(const ProductModel& model, const SignPattern& s) {
    SignedLog out{0.0, +1};
    for (std::size_t i = 0; i < model.n(); ++i) {
        const double mu = model.mu[i];
        if (mu == 0.0 || (mu > 0.0) != (s[i] > 0)) return {neg_inf, 0};
        out.log_abs += std::log(std::fabs(mu));
        if (mu < 0.0) out.sign = -out.sign;
    }
    return out;
}

}  // namespace detail

// Solve g_s(beta) = x and assemble the full saddle record. tol is relative
// on the product constraint.
inline SaddlePoint solve_saddle(const ProductModel& model, const SignPattern& s, double x,
                                double tol = 1e-12) {
    if (s.size() != model.n()) {
        throw Error(ErrorCode::length_mismatch, "pattern length does not match model size");
    }
    if (!signpat::is_admissible(s)) {
        throw Error(ErrorCode::usage, "sign pattern must have an even number of -1 entries");
    }
    if (!(x > 0.0)) {
        throw Error(ErrorCode::no_saddle_in_region, "threshold must be positive");
    }
    const double log_x = std::log(x);

    // Below the beta -> 0 limit of the product there is no boundary
    // minimizer in this orthant; that only happens for small x, outside the
    // asymptotic regime, and is reported rather than clamped.
    const SignedLog floor = detail::product_floor(model, s);
    if (floor.sign > 0 && floor.log_abs >= log_x) {
        throw Error(ErrorCode::no_saddle_in_region,
                    "threshold below the small-beta limit of the constrained product");
    }

    const double r = asymptotic::balanced_scale(model, x);
    double beta = r * r;
    double lo = beta * 0.25;
    double hi = beta * 4.0;
    // Expand the bracket until the gap changes sign.
    while (detail::log_gap(model, s, lo, log_x).value > 0.0) {
        hi = lo;
        lo *= 0.0625;
        if (lo < 1e-300) {
            throw Error(ErrorCode::no_saddle_in_region, "bracket collapsed toward beta = 0");
        }
    }
    while (detail::log_gap(model, s, hi, log_x).value < 0.0) {
        lo = hi;
        hi *= 16.0;
        if (hi > 1e300) {
            throw Error(ErrorCode::tolerance_not_reached, "bracket expansion overflow");
        }
    }

    beta = std::min(std::max(beta, lo), hi);
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        const auto gap = detail::log_gap(model, s, beta, log_x);
        if (std::fabs(gap.value) <= 0.9 * tol) {
            converged = true;
            break;
        }
        if (gap.value > 0.0) {
            hi = std::min(hi, beta);
        } else {
            lo = std::max(lo, beta);
        }
        double next = beta - gap.value / gap.slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == beta) {
            converged = true;  // bracket exhausted at machine precision
            break;
        }
        beta = next;
    }
    if (!converged) {
        throw Error(ErrorCode::tolerance_not_reached, "saddle solve exceeded iteration budget");
    }

    SaddlePoint sp;
    sp.pattern = s;
    sp.x = x;
    sp.beta = beta;
    sp.coords.resize(model.n());
    for (std::size_t i = 0; i < model.n(); ++i) {
        sp.coords[i] = select_root(model.mu[i], model.sigma[i], s[i], beta);
    }
    sp.exponent = detail::gaussian_exponent(model, sp.coords);
    const double un = sp.coords.back();
    const double sn2 = model.sigma.back() * model.sigma.back();
    sp.exponent_slope = un * (un - model.mu.back()) / (sn2 * x);
    sp.hessian = hessian_at(model, sp.coords);
    sp.log_prefactor = log_prefactor_a(model, sp.coords, sp.hessian);
    return sp;
}

// Per-coordinate corrections of the saddle around the balanced scale:
// u_i = s_i sigma_i r (1 + relative_offset_i / r + scale_correction / r^2 + ...).
struct ExpansionCoefficients {
    double common_offset = 0.0;              // shared constant fixed by the constraint
    double scale_correction = 0.0;           // common second-order term, nonnegative
    std::vector<double> offset;              // absolute coordinate shifts
    std::vector<double> relative_offset;     // offsets divided by s_i sigma_i; sums to zero
};

inline ExpansionCoefficients expansion_coefficients(const ProductModel& model,
                                                    const SignPattern& s) {
    if (s.size() != model.n()) {
        throw Error(ErrorCode::length_mismatch, "pattern length does not match model size");
    }
    const std::size_t n = model.n();
    ExpansionCoefficients out;
    out.offset.resize(n);
    out.relative_offset.resize(n);

    double mean_ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_ratio += model.mu[i] / (static_cast<double>(s[i]) * model.sigma[i]);
    }
    mean_ratio /= static_cast<double>(n);
    out.common_offset = -mean_ratio;

    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double signed_sigma = static_cast<double>(s[i]) * model.sigma[i];
        out.offset[i] = 0.5 * model.mu[i] + 0.5 * out.common_offset * signed_sigma;
        out.relative_offset[i] = out.offset[i] / signed_sigma;
        const double dev = model.mu[i] / signed_sigma - mean_ratio;
        spread += dev * dev;
    }
    out.scale_correction = spread / (8.0 * static_cast<double>(n));
    return out;
}

// Closed-form approximation of the exponent at the saddle: the exact value
// minus an O(1/r) remainder.
inline double exponent_expansion(const ProductModel& model, const SignPattern& s, double x) {
    const double n = static_cast<double>(model.n());
    const double r = asymptotic::balanced_scale(model, x);
    const double score = signpat::pattern_score(model, s);
    return 0.5 * n * r * r - score * r - 0.25 * (sum_ratio_squares(model) - score * score / n);
}

// Three-term predicted saddle coordinates s_i sigma_i r (1 + a/r + c/r^2).
inline std::vector<double> refined_saddle_prediction(const ProductModel& model,
                                                     const SignPattern& s, double x) {
    const double r = asymptotic::balanced_scale(model, x);
    const ExpansionCoefficients coeff = expansion_coefficients(model, s);
    std::vector<double> out(model.n());
    for (std::size_t i = 0; i < model.n(); ++i) {
        out[i] = static_cast<double>(s[i]) * model.sigma[i] * r *
                 (1.0 + coeff.relative_offset[i] / r + coeff.scale_correction / (r * r));
    }
    return out;
}

// Pre-closed-form tail estimate: sum over all admissible patterns of
// A_s / S_s' * exp(-S_s), assembled from the exact per-pattern saddles and
// reduced in enumeration order.
inline TailEstimate saddle_sum_estimate(const ProductModel& model, double x, double tol = 1e-12) {
    const std::size_t n = model.n();
    double acc = neg_inf;
    for (const SignPattern& s : signpat::enumerate_admissible(n)) {
        try {
            const SaddlePoint sp = solve_saddle(model, s, x, tol);
            acc = log_add(acc,
                          sp.log_prefactor - std::log(sp.exponent_slope) - sp.exponent);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " [pattern " +
                                      signpat::pattern_string(s) + "]");
        }
    }
    const double log_p = log_mean_constant(model) -
                         0.5 * static_cast<double>(n) * std::log(2.0 * asymptotic::pi) -
                         log_sigma_product(model) + acc;
    return make_estimate(log_p, Method::saddle_sum);
}

}  // namespace prodtail::saddle
