#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "prodtail/estimate.hpp"
#include "prodtail/logspace.hpp"
#include "prodtail/model.hpp"
#include "prodtail/signpat.hpp"

// Closed-form right-tail asymptotics for the product of independent normals,
// evaluated term by term in log space, plus the diagnostic upper bound for
// the unbalanced part of the constraint set.

namespace prodtail::asymptotic {

inline constexpr double pi = 3.1415926535897932384626433832795;
inline constexpr double ln2 = 0.69314718055994530941723212145818;

// r(x) = (x / prod sigma_i)^(1/n), the common magnitude of the balanced
// saddle coordinates.
inline double balanced_scale(const ProductModel& model, double x) {
    return std::exp((std::log(x) - log_sigma_product(model)) /
                    static_cast<double>(model.n()));
}

// Term-by-term decomposition of the closed-form estimate. log_total is the
// stored floating-point sum of the parts, in field order.
struct AsymptoticBreakdown {
    double r = 0.0;
    double log_c = 0.0;          // log of the mean-dependent constant C
    double exp_quadratic = 0.0;  // -(n/2) r^2
    double exp_linear = 0.0;     // L* r
    double exp_const = 0.0;      // (1/4)(sum (mu_i/sigma_i)^2 - L*^2/n)
    double log_prefactor = 0.0;  // log[m* / (2^(n/2) sqrt(pi n)) / r]
    double log_total = 0.0;
    bool regime_warning = false;
    signpat::SignOptimum optimum;
};

// The closed-form estimate requires at least one nonzero mean; the all-zero
// case follows a different asymptotic and is rejected explicitly.
inline std::pair<TailEstimate, AsymptoticBreakdown> theorem1_estimate(const ProductModel& model,
                                                                      double x) {
    if (all_means_zero(model)) {
        throw Error(ErrorCode::all_means_zero,
                    "the closed-form tail estimate requires a nonzero mean");
    }
    const double n = static_cast<double>(model.n());

    AsymptoticBreakdown b;
    b.optimum = signpat::optimize_linear(model);
    const double best = b.optimum.max_score;

    b.r = balanced_scale(model, x);
    b.log_c = log_mean_constant(model);
    b.exp_quadratic = -0.5 * n * b.r * b.r;
    b.exp_linear = best * b.r;
    b.exp_const = 0.25 * (sum_ratio_squares(model) - best * best / n);
    b.log_prefactor =
        b.optimum.multiplicity.log() - 0.5 * n * ln2 - 0.5 * std::log(pi * n) - std::log(b.r);
    b.log_total = b.log_c + b.exp_quadratic + b.exp_linear + b.exp_const + b.log_prefactor;
    // Heuristic out-of-regime flag: the quadratic term should dominate the
    // linear one by a wide margin before the formula means anything.
    b.regime_warning = b.r < 3.0 * std::max(1.0, std::fabs(best));

    return {make_estimate(b.log_total, Method::theorem1), std::move(b)};
}

// Upper bound on the contribution of the unbalanced region (some coordinate
// below a_x). Valid once b_x clears every |mu_j|.
struct UnbalancedBound {
    double a_x = 0.0;
    double b_x = 0.0;
    double log_bound = 0.0;
};

inline UnbalancedBound unbalanced_bound(const ProductModel& model, double x) {
    const std::size_t n = model.n();
    if (n < 2) {
        throw Error(ErrorCode::n_too_small, "no balanced/unbalanced split for n = 1");
    }
    const double log_x = std::log(x);
    if (!(log_x > 1.0)) {
        throw Error(ErrorCode::bound_not_valid, "requires x > e");
    }
    UnbalancedBound out;
    const double root = std::exp(log_x / static_cast<double>(n));  // x^(1/n)
    out.a_x = root / log_x;
    out.b_x = root * std::pow(log_x, 1.0 / static_cast<double>(n - 1));

    double max_abs_mu = 0.0;
    for (double m : model.mu) max_abs_mu = std::max(max_abs_mu, std::fabs(m));
    if (out.b_x < max_abs_mu) {
        throw Error(ErrorCode::bound_not_valid, "b_x below max |mu_j|; x too small for the bound");
    }

    std::vector<double> terms;
    terms.reserve(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = (out.b_x - model.mu[j]) / model.sigma[j];
        const double hi = (out.b_x + model.mu[j]) / model.sigma[j];
        terms.push_back(-0.5 * lo * lo);
        terms.push_back(-0.5 * hi * hi);
    }
    out.log_bound = log_sum_exp(terms);
    return out;
}

}  // namespace prodtail::asymptotic
