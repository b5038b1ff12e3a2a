#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "prodtail/estimate.hpp"
#include "prodtail/logspace.hpp"
#include "prodtail/model.hpp"
#include "prodtail/saddle.hpp"
#include "prodtail/signpat.hpp"

// Seeded Monte Carlo; plain sampling and mean-shift importance sampling
// centered at the per-pattern saddles of the maximizing sign patterns.
//
// Randomness is counter-based: draw k of a run is a hash of (seed, k), so
// any sample can be generated independently of the others. Shards own
// disjoint global-index ranges and are reduced in shard order, which makes
// results bit-stable for a fixed shard count regardless of scheduling.

namespace prodtail::oracle {

struct McConfig {
    enum class Proposal { plain, saddle_tilt };

    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 0;
    std::uint32_t shards = 1;
    Proposal proposal = Proposal::plain;
};

namespace mcdetail {

// SplitMix64 stream accessed at an arbitrary index.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(splitmix64_at(seed, index) >> 11) * 0x1.0p-53;
}

// Box-Muller; each standard normal consumes its own pair of counters.
inline double standard_normal(std::uint64_t seed, std::uint64_t pair_index) {
    const double u1 = uniform01(seed, 2 * pair_index);
    const double u2 = uniform01(seed, 2 * pair_index + 1);
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    return radius * std::cos(2.0 * asymptotic::pi * u2);
}

// prod coords > x, evaluated in sign-and-log form so huge n cannot overflow.
inline bool product_exceeds(const std::vector<double>& coords, double x) {
    SignedLog prod{0.0, +1};
    for (double c : coords) {
        if (c == 0.0) return x < 0.0;
        prod.log_abs += std::log(std::fabs(c));
        if (c < 0.0) prod.sign = -prod.sign;
    }
    if (x == 0.0) return prod.sign > 0;
    return signed_log_greater(prod, SignedLog::from_value(x));
}

struct ShardAccumulator {
    std::uint64_t hits = 0;          // plain mode
    double log_weight_sum = neg_inf; // tilt mode: log sum of accepted weights
    double log_weight_sq = neg_inf;  // tilt mode: log sum of squared weights
    std::uint64_t accepted = 0;
};

// Maximizer patterns for the tilt mixture. Exhaustive for n <= 20; above
// that the linear characterization is expanded when small enough, else a
// single witness keeps the estimator unbiased at possibly higher variance.
inline std::vector<signpat::SignPattern> maximizer_patterns(const ProductModel& model) {
    if (model.n() <= 20) return signpat::optimize_brute(model).witnesses;

    const StandardizedRatios ratios = standardized_ratios(model);
    const signpat::SignOptimum linear = signpat::optimize_linear(model);
    const auto& witness = linear.witnesses.front();
    std::vector<signpat::SignPattern> out;

    if (ratios.k >= 1 && ratios.k <= 13) {  // 2^(k-1) <= 4096
        int base_parity = +1;
        for (std::size_t i = 0; i < model.n(); ++i) {
            if (model.mu[i] != 0.0 && ratios.a[i] < 0.0) base_parity = -base_parity;
        }
        const std::uint64_t combos = std::uint64_t{1} << (ratios.k - 1);
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
            signpat::SignPattern s = witness;
            int parity = +1;
            for (std::size_t b = 0; b + 1 < ratios.k; ++b) {
                const bool neg = (mask >> b) & 1u;
                s[ratios.zero_set[b]] = neg ? -1 : +1;
                if (neg) parity = -parity;
            }
            s[ratios.zero_set.back()] = static_cast<std::int8_t>(parity * base_parity);
            out.push_back(std::move(s));
        }
        return out;
    }
    if (ratios.k == 0 && linear.multiplicity.count > 1 && linear.multiplicity.count <= 4096) {
        double min_abs = std::fabs(ratios.a[0]);
        for (double a : ratios.a) min_abs = std::min(min_abs, std::fabs(a));
        for (std::size_t i = 0; i < model.n(); ++i) {
            if (std::fabs(ratios.a[i]) == min_abs) {
                signpat::SignPattern s = witness;
                // rebuild from the sign base, flipping coordinate i
                for (std::size_t j = 0; j < model.n(); ++j) {
                    s[j] = ratios.a[j] < 0.0 ? -1 : +1;
                }
                s[i] = static_cast<std::int8_t>(-s[i]);
                out.push_back(std::move(s));
            }
        }
        return out;
    }
    out.push_back(witness);
    return out;
}

}  // namespace mcdetail

inline TailEstimate mc_estimate(const ProductModel& model, double x, const McConfig& cfg) {
    if (cfg.n_samples < 1 || cfg.shards < 1) {
        throw Error(ErrorCode::usage, "n_samples and shards must be at least 1");
    }
    const std::size_t n = model.n();
    const std::uint64_t total = cfg.n_samples;
    const bool tilted = cfg.proposal == McConfig::Proposal::saddle_tilt;

    // Tilt proposal: equal-weight mixture of mean-shifted normals at the
    // saddle coordinates of every maximizing pattern.
    std::vector<std::vector<double>> centers;
    if (tilted) {
        std::vector<signpat::SignPattern> patterns = mcdetail::maximizer_patterns(model);
        for (const auto& s : patterns) {
            try {
                centers.push_back(saddle::solve_saddle(model, s, x).coords);
            } catch (const Error& e) {
                throw Error(ErrorCode::saddle_unavailable,
                            std::string("tilted proposal needs a solved saddle: ") + e.what());
            }
        }
    }

    // Counters: sample g uses pair indices [g*(n+1), g*(n+1)+n); the extra
    // slot selects the mixture component.
    const std::uint64_t stride = n + 1;
    auto run_shard = [&](std::uint64_t lo, std::uint64_t hi, mcdetail::ShardAccumulator& acc) {
        std::vector<double> draw(n);
        for (std::uint64_t g = lo; g < hi; ++g) {
            const std::uint64_t base = g * stride;
            if (!tilted) {
                for (std::size_t i = 0; i < n; ++i) {
                    draw[i] = model.mu[i] +
                              model.sigma[i] * mcdetail::standard_normal(cfg.seed, base + i);
                }
                if (mcdetail::product_exceeds(draw, x)) ++acc.hits;
                continue;
            }
            const double pick = mcdetail::uniform01(cfg.seed, 2 * (base + n));
            std::size_t component = static_cast<std::size_t>(pick * centers.size());
            if (component >= centers.size()) component = centers.size() - 1;
            for (std::size_t i = 0; i < n; ++i) {
                draw[i] = centers[component][i] +
                          model.sigma[i] * mcdetail::standard_normal(cfg.seed, base + i);
            }
            if (!mcdetail::product_exceeds(draw, x)) continue;
            // log weight = log target - log mixture, shared normalizers cancel
            double log_target = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double z = (draw[i] - model.mu[i]) / model.sigma[i];
                log_target -= 0.5 * z * z;
            }
            double log_mix = neg_inf;
            for (const auto& center : centers) {
                double e = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double z = (draw[i] - center[i]) / model.sigma[i];
                    e -= 0.5 * z * z;
                }
                log_mix = log_add(log_mix, e);
            }
            log_mix -= std::log(static_cast<double>(centers.size()));
            const double lw = log_target - log_mix;
            acc.log_weight_sum = log_add(acc.log_weight_sum, lw);
            acc.log_weight_sq = log_add(acc.log_weight_sq, 2.0 * lw);
            ++acc.accepted;
        }
    };

    std::vector<mcdetail::ShardAccumulator> partials(cfg.shards);
    if (cfg.shards == 1) {
        run_shard(0, total, partials[0]);
    } else {
        std::vector<std::thread> workers;
        for (std::uint32_t sidx = 0; sidx < cfg.shards; ++sidx) {
            const std::uint64_t lo = total * sidx / cfg.shards;
            const std::uint64_t hi = total * (sidx + 1) / cfg.shards;
            workers.emplace_back(run_shard, lo, hi, std::ref(partials[sidx]));
        }
        for (auto& w : workers) w.join();
    }

    TailEstimate est;
    est.method = tilted ? Method::mc_importance : Method::mc_plain;
    est.n_samples = total;
    est.seed = cfg.seed;
    const double dn = static_cast<double>(total);

    if (!tilted) {
        std::uint64_t hits = 0;
        for (const auto& acc : partials) hits += acc.hits;
        if (hits == 0) {
            // 95% one-sided Clopper-Pearson upper bound for zero hits
            const double bound = 1.0 - std::pow(0.05, 1.0 / dn);
            throw Error(ErrorCode::degenerate_variance,
                        "no sample crossed the threshold; p-hat = 0, one-sided 95% bound p <= " +
                            std::to_string(bound));
        }
        const double p = static_cast<double>(hits) / dn;
        est.log_p = std::log(p);
        est.p = p;
        est.stderr_linear = std::sqrt(p * (1.0 - p) / dn);
        est.stderr_rel = *est.stderr_linear / p;
        return est;
    }

    double log_w = neg_inf;
    double log_w2 = neg_inf;
    std::uint64_t accepted = 0;
    for (const auto& acc : partials) {
        log_w = log_add(log_w, acc.log_weight_sum);
        log_w2 = log_add(log_w2, acc.log_weight_sq);
        accepted += acc.accepted;
    }
    if (accepted == 0) {
        const double bound = 1.0 - std::pow(0.05, 1.0 / dn);
        throw Error(ErrorCode::degenerate_variance,
                    "no weighted sample crossed the threshold; p-hat = 0, one-sided 95% bound "
                    "p <= " +
                        std::to_string(bound));
    }
    est.log_p = log_w - std::log(dn);
    if (est.log_p > linear_underflow_log) est.p = std::exp(est.log_p);
    // sample variance of the weighted indicators
    const double log_mean_sq = 2.0 * log_w - std::log(dn);
    const double log_var_sum = log_sub(log_w2, log_mean_sq);
    if (log_var_sum > neg_inf && total > 1) {
        const double log_se =
            0.5 * (log_var_sum - std::log(dn) - std::log(dn - 1.0));
        est.stderr_rel = std::exp(log_se - est.log_p);
        if (log_se > linear_underflow_log) est.stderr_linear = std::exp(log_se);
    } else {
        est.stderr_rel = 0.0;
        est.stderr_linear = 0.0;
    }
    return est;
}

}  // namespace prodtail::oracle
