#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "prodtail/errors.hpp"

namespace prodtail {

// Parameters of Z = X_1 * ... * X_n with independent X_i ~ N(mu_i, sigma_i^2).
// Immutable after construction; share freely across threads.
struct ProductModel {
    std::vector<double> mu;
    std::vector<double> sigma;

    std::size_t n() const { return mu.size(); }
};

// Per-factor mean/sd ratios. zero_set holds the indices with mu[i] == 0
// (exact comparison on the declared parameters; the case split downstream
// is combinatorial, so no tolerance is applied).
struct StandardizedRatios {
    std::vector<double> a;           // a[i] = mu[i] / sigma[i]
    std::vector<std::size_t> zero_set;
    std::size_t k = 0;               // |zero_set|
};

inline ProductModel validate_model(std::vector<double> mu, std::vector<double> sigma) {
    if (mu.size() != sigma.size()) {
        throw Error(ErrorCode::length_mismatch,
                    "mu has " + std::to_string(mu.size()) + " entries, sigma has " +
                        std::to_string(sigma.size()));
    }
    if (mu.empty()) {
        throw Error(ErrorCode::empty_model, "model needs at least one factor");
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (!std::isfinite(mu[i]) || !std::isfinite(sigma[i])) {
            throw Error(ErrorCode::non_finite_parameter,
                        "parameter " + std::to_string(i) + " is not finite");
        }
        if (!(sigma[i] > 0.0)) {
            throw Error(ErrorCode::non_positive_sigma,
                        "sigma[" + std::to_string(i) + "] = " + std::to_string(sigma[i]));
        }
    }
    return ProductModel{std::move(mu), std::move(sigma)};
}

inline StandardizedRatios standardized_ratios(const ProductModel& model) {
    StandardizedRatios out;
    out.a.resize(model.n());
    for (std::size_t i = 0; i < model.n(); ++i) {
        out.a[i] = model.mu[i] / model.sigma[i];
        if (model.mu[i] == 0.0) out.zero_set.push_back(i);
    }
    out.k = out.zero_set.size();
    return out;
}

// log prod sigma_i
inline double log_sigma_product(const ProductModel& model) {
    double acc = 0.0;
    for (double s : model.sigma) acc += std::log(s);
    return acc;
}

// log of the Gaussian normalization constant exp(-sum mu_i^2 / 2 sigma_i^2).
inline double log_mean_constant(const ProductModel& model) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.n(); ++i) {
        const double a = model.mu[i] / model.sigma[i];
        acc += a * a;
    }
    return -0.5 * acc;
}

// sum (mu_i/sigma_i)^2
inline double sum_ratio_squares(const ProductModel& model) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.n(); ++i) {
        const double a = model.mu[i] / model.sigma[i];
        acc += a * a;
    }
    return acc;
}

inline bool all_means_zero(const ProductModel& model) {
    for (double m : model.mu)
        if (m != 0.0) return false;
    return true;
}

}  // namespace prodtail
