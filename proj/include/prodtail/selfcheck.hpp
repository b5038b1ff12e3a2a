#pragma once

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "prodtail/prodtail.hpp"
#include "prodtail/sweep.hpp"

// Invariant suites and the acceptance criteria, shared by the `validate`
// CLI subcommand and the acceptance test binary. Every check returns its
// measured values so failures are diagnosable from the one-line report.

namespace prodtail::selfcheck {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

enum class Scope { fast, full };

namespace detail {

inline std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// Deterministic generator for test models.
struct Rng {
    std::uint64_t seed;
    std::uint64_t counter = 0;

    explicit Rng(std::uint64_t s) : seed(s) {}
    double uniform() { return oracle::mcdetail::uniform01(seed, counter++); }
    std::uint64_t integer(std::uint64_t bound) {
        return std::min<std::uint64_t>(static_cast<std::uint64_t>(uniform() * bound), bound - 1);
    }
};

// Dyadic parameters make exact score ties common, which stresses the
// multiplicity counting; continuous parameters stress general agreement.
inline ProductModel random_model(Rng& rng, std::size_t n, bool dyadic) {
    std::vector<double> mu(n), sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (dyadic) {
            if (rng.uniform() < 0.3) {
                mu[i] = 0.0;
            } else {
                const int k = 1 + static_cast<int>(rng.integer(16));
                mu[i] = (rng.uniform() < 0.5 ? -k : k) / 8.0;
            }
            const double choices[3] = {0.5, 1.0, 2.0};
            sigma[i] = choices[rng.integer(3)];
        } else {
            mu[i] = rng.uniform() < 0.25 ? 0.0 : (rng.uniform() * 6.0 - 3.0);
            sigma[i] = 0.3 + 2.2 * rng.uniform();
        }
    }
    return ProductModel{std::move(mu), std::move(sigma)};
}

inline ProductModel reference_model() {
    return validate_model({1.0, 0.7, -0.4, 1.3}, {1.0, 1.2, 1.5, 0.9});
}

inline signpat::SignPattern random_admissible(Rng& rng, std::size_t n) {
    return signpat::pattern_at(n, rng.integer(std::uint64_t{1} << (n - 1)));
}

}  // namespace detail

// --- acceptance criteria -------------------------------------------------

// Sign-optimizer oracle equivalence over random models.
inline CheckResult criterion_sign_oracle_equivalence() {
    detail::Rng rng(0xA11CE5ull);
    double worst_score = 0.0;
    int count_mismatch = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.integer(12);
        const ProductModel model = detail::random_model(rng, n, trial < 500);
        const auto brute = signpat::optimize_brute(model);
        const auto linear = signpat::optimize_linear(model);
        worst_score = std::max(worst_score, std::fabs(brute.max_score - linear.max_score));
        if (brute.multiplicity.count != linear.multiplicity.count) ++count_mismatch;
    }
    const bool pass = worst_score <= 1e-12 && count_mismatch == 0;
    return {"sign-optimizer oracle equivalence (1000 models)", pass,
            detail::fmt("max |dL*| = %.3g (<= 1e-12), multiplicity mismatches = %d", worst_score,
                        count_mismatch)};
}

// Frozen regression for the n=4 reference model.
inline CheckResult criterion_reference_model_regression() {
    const ProductModel model = detail::reference_model();
    const double expected = 497.0 / 180.0;  // sum|a| - 2 min|a|
    const auto brute = signpat::optimize_brute(model);
    const auto linear = signpat::optimize_linear(model);
    const bool pass = std::fabs(brute.max_score - expected) <= 1e-12 &&
                      std::fabs(linear.max_score - expected) <= 1e-12 &&
                      brute.multiplicity.count == 1 && linear.multiplicity.count == 1 &&
                      signpat::pattern_string(brute.witnesses.front()) == "++++" &&
                      signpat::pattern_string(linear.witnesses.front()) == "++++";
    return {"reference n=4 model regression", pass,
            detail::fmt("L* = %.15f (expect %.15f), m* = %llu, witness = %s", brute.max_score,
                        expected, static_cast<unsigned long long>(brute.multiplicity.count),
                        signpat::pattern_string(brute.witnesses.front()).c_str())};
}

// Zero-mean saddle has the exact closed form beta = r^2, u = s sigma r,
// S = n r^2 / 2.
inline CheckResult criterion_zero_mean_exactness() {
    detail::Rng rng(0xBEEFull);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.integer(8);
        std::vector<double> mu(n, 0.0), sigma(n);
        for (auto& s : sigma) s = 0.3 + 2.2 * rng.uniform();
        const ProductModel model{mu, sigma};
        const signpat::SignPattern s = detail::random_admissible(rng, n);
        for (double x : {1e2, 1e6}) {
            const auto sp = saddle::solve_saddle(model, s, x);
            const double r = asymptotic::balanced_scale(model, x);
            worst = std::max(worst, std::fabs(sp.beta / (r * r) - 1.0));
            worst = std::max(worst,
                             std::fabs(sp.exponent / (0.5 * static_cast<double>(n) * r * r) - 1.0));
            for (std::size_t i = 0; i < n; ++i) {
                const double ideal = static_cast<double>(s[i]) * sigma[i] * r;
                worst = std::max(worst, std::fabs(sp.coords[i] / ideal - 1.0));
            }
        }
    }
    return {"zero-mean saddle exactness", worst <= 1e-12,
            detail::fmt("max relative deviation = %.3g (<= 1e-12)", worst)};
}

// n=1 reduction against the exact normal survival function. The grid is
// x/sigma in {8,12,16,24} for the trend; the error thresholds are checked
// at (x-mu)/sigma = 8 and 24.
inline CheckResult criterion_mills_reduction() {
    const ProductModel model = validate_model({1.0}, {2.0});
    std::string detail_str;
    bool decreasing = true;
    double prev = 1e300;
    for (double ratio : {8.0, 12.0, 16.0, 24.0}) {
        const double x = ratio * model.sigma[0];
        const auto [est, bd] = asymptotic::theorem1_estimate(model, x);
        const double exact = norm_log_sf((x - model.mu[0]) / model.sigma[0]);
        const double gap = std::fabs(est.log_p - exact);
        if (gap >= prev) decreasing = false;
        prev = gap;
        detail_str += detail::fmt("|dlog|(x/sigma=%g)=%.4f ", ratio, gap);
    }
    auto rel_err_at = [&](double z) {
        const double x = model.mu[0] + z * model.sigma[0];
        const auto [est, bd] = asymptotic::theorem1_estimate(model, x);
        return std::fabs(std::exp(est.log_p - norm_log_sf(z)) - 1.0);
    };
    const double err8 = rel_err_at(8.0);
    const double err24 = rel_err_at(24.0);
    detail_str += detail::fmt("| rel_err(z=8)=%.4f (<0.05) rel_err(z=24)=%.4f (<0.01)", err8,
                              err24);
    const bool pass = decreasing && err8 < 0.05 && err24 < 0.01;
    return {"n=1 reduction to the normal tail", pass, detail_str};
}

// Exponent expansion converges to the exact saddle exponent at rate 1/r.
inline CheckResult criterion_expansion_convergence() {
    const ProductModel model = detail::reference_model();
    const signpat::SignPattern best(4, +1);
    std::vector<double> distances, scaled;
    for (int e = 2; e <= 8; ++e) {
        const double x = std::pow(10.0, e);
        const auto sp = saddle::solve_saddle(model, best, x);
        const double d = std::fabs(sp.exponent - saddle::exponent_expansion(model, best, x));
        distances.push_back(d);
        scaled.push_back(asymptotic::balanced_scale(model, x) * d);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < distances.size(); ++i) {
        if (!(distances[i] < distances[i - 1])) decreasing = false;
    }
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = distances.size() - 4; i < distances.size(); ++i) {
        lo = std::min(lo, scaled[i]);
        hi = std::max(hi, scaled[i]);
    }
    const bool bounded = hi / lo < 3.0;
    return {"exponent expansion convergence", decreasing && bounded,
            detail::fmt("d: %.3g -> %.3g strictly decreasing=%d; r*d in [%.4f, %.4f], ratio %.3f "
                        "(< 3)",
                        distances.front(), distances.back(), decreasing, lo, hi, hi / lo)};
}

// Hessian determinant, Laplace prefactor and exponent slope approach their
// balanced-scale limits.
inline CheckResult criterion_prefactor_limits() {
    const ProductModel model = detail::reference_model();
    const signpat::SignPattern best(4, +1);
    const double n = 4.0;
    double sigma_sq_head = 1.0;
    for (std::size_t i = 0; i + 1 < model.n(); ++i) sigma_sq_head *= model.sigma[i] * model.sigma[i];
    const double sigma_prod = std::exp(log_sigma_product(model));

    std::vector<double> dev_det, dev_a, dev_slope;
    double last_det = 0, last_a = 0, last_slope = 0, last_r = 0;
    for (double x : {1e4, 1e6, 1e8, 2e8}) {
        const auto sp = saddle::solve_saddle(model, best, x);
        const double r = asymptotic::balanced_scale(model, x);
        const double det_ratio = std::exp(saddle::cholesky_log_det(sp.hessian)) * sigma_sq_head /
                                 (n * std::pow(2.0, n - 1.0));
        const double a_ratio = std::exp(sp.log_prefactor) * std::sqrt(n) * std::pow(r, n - 1.0) /
                               std::pow(asymptotic::pi, 0.5 * (n - 1.0));
        const double slope_ratio = sp.exponent_slope * sigma_prod * std::pow(r, n - 2.0);
        dev_det.push_back(std::fabs(det_ratio - 1.0));
        dev_a.push_back(std::fabs(a_ratio - 1.0));
        dev_slope.push_back(std::fabs(slope_ratio - 1.0));
        last_det = det_ratio;
        last_a = a_ratio;
        last_slope = slope_ratio;
        last_r = r;
    }
    auto trending = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] < v[i - 1])) return false;
        }
        return true;
    };
    const bool inside = last_r >= 100.0 && last_det > 0.9 && last_det < 1.1 && last_a > 0.9 &&
                        last_a < 1.1 && last_slope > 0.9 && last_slope < 1.1;
    const bool pass = inside && trending(dev_det) && trending(dev_a) && trending(dev_slope);
    return {"prefactor limits", pass,
            detail::fmt("at r=%.1f: detH ratio %.4f, A ratio %.4f, S' ratio %.4f; trends %d/%d/%d",
                        last_r, last_det, last_a, last_slope, trending(dev_det), trending(dev_a),
                        trending(dev_slope))};
}

// Closed form vs saddle sum converge to each other.
inline CheckResult criterion_tier_agreement() {
    bool pass = true;
    std::string detail_str;
    detail::Rng rng(0x7E57ull);
    ProductModel random3 = detail::random_model(rng, 3, false);
    while (all_means_zero(random3)) random3 = detail::random_model(rng, 3, false);

    int model_idx = 0;
    for (const ProductModel& model : {detail::reference_model(), random3}) {
        double prev = 1e300;
        double last = 0.0;
        bool decreasing = true;
        for (int e = 2; e <= 8; ++e) {
            const double x = std::pow(10.0, e);
            const double t1 = asymptotic::theorem1_estimate(model, x).first.log_p;
            const double ss = saddle::saddle_sum_estimate(model, x).log_p;
            last = std::fabs(t1 - ss);
            if (last >= prev) decreasing = false;
            prev = last;
        }
        pass = pass && decreasing && last < 0.05;
        detail_str += detail::fmt("model%d: decreasing=%d gap(1e8)=%.4f (< 0.05); ", model_idx++,
                                  decreasing, last);
    }
    return {"tier agreement theorem1 vs saddle sum", pass, detail_str};
}

// Quadrature against plain Monte Carlo at n=2, plus tolerance-halving
// self-consistency.
inline CheckResult criterion_oracle_cross_check() {
    const ProductModel model = validate_model({1.0, 0.5}, {1.0, 1.0});
    bool pass = true;
    std::string detail_str;
    for (double x : {2.0, 5.0, 10.0}) {
        const TailEstimate quad = oracle::tail_quadrature(model, x);
        oracle::McConfig cfg;
        cfg.n_samples = 10'000'000;
        cfg.seed = 0xC815EEDull;
        cfg.shards = 2;
        const TailEstimate mc = oracle::mc_estimate(model, x, cfg);
        const double pull = std::fabs(*quad.p - *mc.p) / *mc.stderr_linear;
        pass = pass && pull <= 3.0;
        detail_str += detail::fmt("x=%g pull=%.2f; ", x, pull);

        oracle::QuadratureConfig half;
        half.rel_tol = 0.5e-10;
        const TailEstimate quad2 = oracle::tail_quadrature(model, x, half);
        const double shift = std::fabs(quad2.log_p - quad.log_p);
        pass = pass && shift <= *quad.rel_accuracy;
        detail_str += detail::fmt("halving shift=%.2g (acc %.2g); ", shift, *quad.rel_accuracy);
    }
    return {"n=2 quadrature vs plain MC", pass, detail_str};
}

// Reproduction of the accuracy-vs-threshold comparison: relative error of
// the closed form against a tilted-MC oracle decreases along the grid.
inline CheckResult criterion_figure_reproduction() {
    sweep::SweepSpec spec;
    spec.x_min = 1e2;
    spec.x_max = 1e8;
    spec.points = 7;
    spec.spacing = sweep::Spacing::geometric;
    spec.tiers = {Method::theorem1, Method::mc_importance};
    spec.mc_samples = 1'000'000;
    spec.seed = 20260808;
    const sweep::SweepResult result = sweep::run_sweep(detail::reference_model(), spec);

    bool finite = true, weakly_decreasing = true;
    for (const auto& row : result.rows) {
        if (!row.log10_oracle || !row.mc_stderr_rel || !row.rel_err_theorem1) finite = false;
    }
    std::string detail_str;
    if (finite) {
        const std::size_t half = result.rows.size() / 2;
        for (std::size_t i = half + 1; i < result.rows.size(); ++i) {
            if (*result.rows[i].rel_err_theorem1 > *result.rows[i - 1].rel_err_theorem1) {
                weakly_decreasing = false;
            }
        }
        const auto& top = result.rows.back();
        const double ratio_dev =
            std::fabs(std::exp((*top.log10_theorem1 - *top.log10_oracle) * sweep::ln10) - 1.0);
        const double band = 4.0 * *top.mc_stderr_rel;
        const bool in_band = ratio_dev <= band;
        detail_str = detail::fmt("upper-half rel_err: ");
        for (std::size_t i = half; i < result.rows.size(); ++i) {
            detail_str += detail::fmt("%.4f ", *result.rows[i].rel_err_theorem1);
        }
        detail_str += detail::fmt("| top ratio dev %.4f vs 4*stderr %.4f", ratio_dev, band);
        return {"figure reproduction sweep", weakly_decreasing && in_band, detail_str};
    }
    return {"figure reproduction sweep", false, "oracle confidence interval not finite"};
}

// Scale and pair-flip invariance of the closed form.
inline CheckResult criterion_invariance_suite() {
    detail::Rng rng(0x1144ull);
    double worst_scale = 0.0, worst_flip = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.integer(10);
        ProductModel model = detail::random_model(rng, n, false);
        if (all_means_zero(model)) model.mu[rng.integer(n)] = 1.0 + rng.uniform();
        const double r = 2.0 + 6.0 * rng.uniform();
        const double x =
            std::exp(log_sigma_product(model) + static_cast<double>(n) * std::log(r));
        const double base = asymptotic::theorem1_estimate(model, x).first.log_p;

        const double c = (trial % 3 == 0) ? 0.5 : (trial % 3 == 1 ? 2.0 : 3.0);
        ProductModel scaled = model;
        for (auto& m : scaled.mu) m *= c;
        for (auto& s : scaled.sigma) s *= c;
        const double scaled_x = x * std::pow(c, static_cast<double>(n));
        worst_scale = std::max(
            worst_scale,
            std::fabs(asymptotic::theorem1_estimate(scaled, scaled_x).first.log_p - base));

        if (n >= 2) {
            ProductModel flipped = model;
            const std::size_t i = rng.integer(n);
            std::size_t j = rng.integer(n);
            if (j == i) j = (i + 1) % n;
            flipped.mu[i] = -flipped.mu[i];
            flipped.mu[j] = -flipped.mu[j];
            worst_flip = std::max(
                worst_flip,
                std::fabs(asymptotic::theorem1_estimate(flipped, x).first.log_p - base));
        }
    }
    const bool pass = worst_scale <= 1e-12 && worst_flip <= 1e-12;
    return {"scale and pair-flip invariance (200 models)", pass,
            detail::fmt("max |dlog| scale = %.3g, pair-flip = %.3g (<= 1e-12)", worst_scale,
                        worst_flip)};
}

// The unbalanced-region bound falls away from the estimate once the bound
// is in its regime. For these sigmas that happens at x around 1e8 (the
// slowest factor has sigma = 1.5, so the Gaussian-max bound overtakes the
// product tail only once (log x)^(2/3) clears 2 sigma_max^2 n / prod-scale).
inline CheckResult criterion_negligibility() {
    const ProductModel model = detail::reference_model();
    std::vector<double> gaps;
    for (int e = 8; e <= 12; ++e) {
        const double x = std::pow(10.0, e);
        const auto bound = asymptotic::unbalanced_bound(model, x);
        const double log_p = asymptotic::theorem1_estimate(model, x).first.log_p;
        gaps.push_back(bound.log_bound - log_p);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        if (!(gaps[i] < gaps[i - 1])) decreasing = false;
    }
    const bool pass = decreasing && gaps.back() < -20.0;
    return {"unbalanced-region negligibility", pass,
            detail::fmt("gap: %.1f -> %.1f over x = 1e8..1e12, decreasing=%d, top < -20: %d",
                        gaps.front(), gaps.back(), decreasing, gaps.back() < -20.0)};
}

inline std::vector<CheckResult> acceptance_criteria() {
    return {
        criterion_sign_oracle_equivalence(),
        criterion_reference_model_regression(),
        criterion_zero_mean_exactness(),
        criterion_mills_reduction(),
        criterion_expansion_convergence(),
        criterion_prefactor_limits(),
        criterion_tier_agreement(),
        criterion_oracle_cross_check(),
        criterion_figure_reproduction(),
        criterion_invariance_suite(),
        criterion_negligibility(),
    };
}

// --- fast invariant suite ------------------------------------------------

namespace detail {

inline CheckResult check_enumeration() {
    bool pass = true;
    for (std::size_t n = 1; n <= 6; ++n) {
        auto patterns = signpat::enumerate_admissible(n);
        std::vector<std::string> seen;
        for (const auto& s : patterns) {
            if (!signpat::is_admissible(s)) pass = false;
            seen.push_back(signpat::pattern_string(s));
        }
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        if (seen.size() != (std::size_t{1} << (n - 1))) pass = false;
    }
    return {"admissible enumeration counts", pass, "n = 1..6 distinct and admissible"};
}

inline CheckResult check_optimizers_fast() {
    Rng rng(0xFA57ull);
    double worst = 0.0;
    int mismatches = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng.integer(6);
        const ProductModel model = random_model(rng, n, trial % 2 == 0);
        const auto brute = signpat::optimize_brute(model);
        const auto linear = signpat::optimize_linear(model);
        worst = std::max(worst, std::fabs(brute.max_score - linear.max_score));
        if (brute.multiplicity.count != linear.multiplicity.count) ++mismatches;
    }
    return {"sign optimizers agree (fast)", worst <= 1e-12 && mismatches == 0,
            fmt("max |dL*| = %.3g, mismatches = %d", worst, mismatches)};
}

inline CheckResult check_stationarity() {
    Rng rng(0x57A7ull);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.integer(6);
        const ProductModel model = random_model(rng, n, false);
        const signpat::SignPattern s = random_admissible(rng, n);
        const double x = std::exp(log_sigma_product(model)) * std::pow(3.0 + 40.0 * rng.uniform(),
                                                                       static_cast<double>(n));
        const auto sp = saddle::solve_saddle(model, s, x);
        for (std::size_t i = 0; i < n; ++i) {
            const double sigma2 = model.sigma[i] * model.sigma[i];
            const double residual =
                (sp.coords[i] - model.mu[i]) / sigma2 - sp.beta / sp.coords[i];
            const double scale = 1.0 + std::fabs(sp.beta / sp.coords[i]);
            worst = std::max(worst, std::fabs(residual) / scale);
            if (static_cast<double>(s[i]) * sp.coords[i] <= 0.0) worst = 1.0;
        }
        const double relation = std::fabs(sp.exponent_slope - sp.beta / x) /
                                std::max(1e-300, sp.beta / x);
        worst = std::max(worst, relation * 1e-3);  // slope identity, looser scale
    }
    return {"saddle stationarity residuals", worst <= 1e-9,
            fmt("max scaled residual = %.3g (<= 1e-9)", worst)};
}

inline CheckResult check_monotone_product() {
    Rng rng(0x30303ull);
    bool pass = true;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng.integer(6);
        const ProductModel model = random_model(rng, n, false);
        const signpat::SignPattern s = random_admissible(rng, n);
        const double b1 = std::exp(rng.uniform() * 10.0 - 5.0);
        const double b2 = b1 * (1.0 + rng.uniform() * 10.0);
        if (!(saddle::product_at(model, s, b1).log_abs <
              saddle::product_at(model, s, b2).log_abs)) {
            pass = false;
        }
    }
    return {"constrained product is increasing in beta", pass, "60 random (model, pattern) pairs"};
}

inline CheckResult check_expansion_identities() {
    Rng rng(0xC0FFEEull);
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.integer(7);
        const ProductModel model = random_model(rng, n, false);
        const signpat::SignPattern s = random_admissible(rng, n);
        const auto coeff = saddle::expansion_coefficients(model, s);
        double sum = 0.0, sum_sq = 0.0;
        for (double a : coeff.relative_offset) {
            sum += a;
            sum_sq += a * a;
        }
        worst = std::max(worst, std::fabs(sum));
        worst = std::max(worst, std::fabs(coeff.scale_correction -
                                          sum_sq / (2.0 * static_cast<double>(n))));
    }
    return {"expansion coefficient identities", worst <= 1e-12,
            fmt("max |sum a| and |c - sum a^2/2n| = %.3g (<= 1e-12)", worst)};
}

inline CheckResult check_rank_one_determinant() {
    double worst = 0.0;
    for (std::size_t n = 2; n <= 12; ++n) {
        saddle::SymMatrix m(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = 0; j + 1 < n; ++j) m.at(i, j) = (i == j) ? 2.0 : 1.0;
        }
        const double det = std::exp(saddle::cholesky_log_det(m));
        worst = std::max(worst, std::fabs(det - static_cast<double>(n)));
    }
    return {"identity-plus-ones determinant equals n", worst <= 1e-9,
            fmt("max |det - n| = %.3g", worst)};
}

inline CheckResult check_normal_far_tail() {
    double worst = 0.0;
    for (double z = 8.0; z <= 36.0; z += 1.0) {
        const double direct = std::log(0.5 * std::erfc(z * sqrt_half));
        worst = std::max(worst, std::fabs(norm_log_sf(z) / direct - 1.0));
    }
    return {"far-tail normal branch agreement", worst <= 1e-14,
            fmt("max relative log deviation = %.3g", worst)};
}

inline CheckResult check_quadrature_basics() {
    const ProductModel m1 = validate_model({0.0}, {1.0});
    const double p_half = std::exp(oracle::tail_quadrature(m1, 0.0).log_p);
    const ProductModel m2 = validate_model({0.0, 0.0}, {1.0, 1.0});
    const double p2 = std::exp(oracle::tail_quadrature(m2, 0.0).log_p);
    const bool pass = std::fabs(p_half - 0.5) <= 1e-12 && std::fabs(p2 - 0.5) <= 1e-9;
    return {"quadrature sign symmetry at x = 0", pass,
            fmt("n=1: %.12f, n=2: %.12f (expect 0.5)", p_half, p2)};
}

inline CheckResult check_mc_symmetry() {
    const ProductModel m2 = validate_model({0.0, 0.0}, {1.0, 1.0});
    oracle::McConfig cfg;
    cfg.n_samples = 1'000'000;
    cfg.seed = 99;
    cfg.shards = 2;
    const auto est = oracle::mc_estimate(m2, 0.0, cfg);
    const double dev = std::fabs(*est.p - 0.5);
    return {"plain MC symmetry at x = 0", dev <= 4.0 * *est.stderr_linear,
            fmt("p = %.6f, 4*stderr = %.6f", *est.p, 4.0 * *est.stderr_linear)};
}

inline CheckResult check_invariance_fast() {
    Rng rng(0x5CA1Eull);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.integer(6);
        ProductModel model = random_model(rng, n, false);
        if (all_means_zero(model)) model.mu[0] = 1.0;
        const double r = 2.0 + 5.0 * rng.uniform();
        const double x =
            std::exp(log_sigma_product(model) + static_cast<double>(n) * std::log(r));
        const double base = asymptotic::theorem1_estimate(model, x).first.log_p;
        ProductModel scaled = model;
        for (auto& m : scaled.mu) m *= 2.0;
        for (auto& s : scaled.sigma) s *= 2.0;
        const double sx = x * std::pow(2.0, static_cast<double>(n));
        worst = std::max(worst,
                         std::fabs(asymptotic::theorem1_estimate(scaled, sx).first.log_p - base));
    }
    return {"theorem1 scale invariance (fast)", worst <= 1e-12,
            fmt("max |dlog| = %.3g", worst)};
}

}  // namespace detail

inline std::vector<CheckResult> run_validation(Scope scope) {
    std::vector<CheckResult> out = {
        detail::check_enumeration(),
        detail::check_optimizers_fast(),
        detail::check_stationarity(),
        detail::check_monotone_product(),
        detail::check_expansion_identities(),
        detail::check_rank_one_determinant(),
        detail::check_normal_far_tail(),
        detail::check_quadrature_basics(),
        detail::check_mc_symmetry(),
        detail::check_invariance_fast(),
        criterion_zero_mean_exactness(),
    };
    if (scope == Scope::full) {
        for (auto& c : acceptance_criteria()) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace prodtail::selfcheck
