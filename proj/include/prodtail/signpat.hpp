#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "prodtail/model.hpp"

// Admissible sign patterns (even number of -1 entries), their scores
// L_s = sum_i s_i mu_i / sigma_i, and the two optimizers: an exhaustive
// oracle and the linear-time case split on the zero set of the means.
//
// Tie handling is exact by design: scores tie iff they are equal after the
// same left-to-right summation, and argmin ties compare |a_i| with ==. The
// multiplicity is a combinatorial statement about the declared parameters,
// so no tolerance is involved anywhere in this module.

namespace prodtail::signpat {

using SignPattern = std::vector<std::int8_t>;  // entries are +1 / -1

inline bool is_admissible(const SignPattern& s) {
    int negatives = 0;
    for (auto v : s) negatives += (v < 0);
    return (negatives % 2) == 0;
}

inline std::string pattern_string(const SignPattern& s) {
    std::string out;
    out.reserve(s.size());
    for (auto v : s) out += (v > 0 ? '+' : '-');
    return out;
}

inline constexpr std::size_t max_enumeration_n = 30;

// Pattern #index in the fixed enumeration order: the first n-1 signs follow
// the binary digits of index (most significant digit = first coordinate,
// 0 -> +1, 1 -> -1) and the last sign is forced to make the product +1.
inline SignPattern pattern_at(std::size_t n, std::uint64_t index) {
    SignPattern s(n, +1);
    int forced = +1;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const bool neg = (index >> (n - 2 - j)) & 1u;
        s[j] = neg ? -1 : +1;
        if (neg) forced = -forced;
    }
    s[n - 1] = static_cast<std::int8_t>(forced);
    return s;
}

// Lazily generated sequence of the 2^(n-1) admissible patterns in
// enumeration order; nothing is materialized, so iterating at n near the
// guard stays in constant memory.
class AdmissiblePatterns {
public:
    explicit AdmissiblePatterns(std::size_t n) : n_(n) {
        if (n_ < 1 || n_ > max_enumeration_n) {
            throw Error(ErrorCode::n_too_large_for_enumeration,
                        "admissible-pattern enumeration supports 1 <= n <= 30, got " +
                            std::to_string(n_));
        }
        count_ = std::uint64_t{1} << (n_ - 1);
    }

    std::uint64_t size() const { return count_; }

    class iterator {
    public:
        iterator(std::size_t n, std::uint64_t index) : n_(n), index_(index) {}
        SignPattern operator*() const { return pattern_at(n_, index_); }
        iterator& operator++() { ++index_; return *this; }
        bool operator!=(const iterator& o) const { return index_ != o.index_; }

    private:
        std::size_t n_;
        std::uint64_t index_;
    };

    iterator begin() const { return iterator(n_, 0); }
    iterator end() const { return iterator(n_, count_); }

private:
    std::size_t n_;
    std::uint64_t count_;
};

inline AdmissiblePatterns enumerate_admissible(std::size_t n) { return AdmissiblePatterns(n); }

inline double pattern_score(const ProductModel& model, const SignPattern& s) {
    if (s.size() != model.n()) {
        throw Error(ErrorCode::length_mismatch, "pattern length does not match model size");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        acc += static_cast<double>(s[i]) * (model.mu[i] / model.sigma[i]);
    }
    return acc;
}

// Maximizer count. Counts stay exact up to 2^63; for the huge power-of-two
// case (very many exact-zero means) only log2 is kept exact.
struct Multiplicity {
    std::uint64_t count = 1;
    int log2_exact = -1;  // >= 0 iff the count is exactly 2^log2_exact

    double log() const {
        if (log2_exact >= 0) return log2_exact * 0.69314718055994530941723212145818;
        return std::log(static_cast<double>(count));
    }

    static Multiplicity power_of_two(std::size_t exponent) {
        Multiplicity m;
        m.log2_exact = static_cast<int>(exponent);
        m.count = exponent < 64 ? (std::uint64_t{1} << exponent) : ~std::uint64_t{0};
        return m;
    }

    static Multiplicity exact(std::uint64_t c) { return Multiplicity{c, -1}; }
};

struct SignOptimum {
    double max_score = 0.0;             // L*
    Multiplicity multiplicity;          // m*
    std::vector<SignPattern> witnesses; // all maximizers (brute) or one (linear)
};

inline SignOptimum optimize_brute(const ProductModel& model) {
    SignOptimum best;
    bool first = true;
    for (const SignPattern& s : enumerate_admissible(model.n())) {
        const double score = pattern_score(model, s);
        if (first || score > best.max_score) {
            best.max_score = score;
            best.witnesses.clear();
            best.witnesses.push_back(s);
            first = false;
        } else if (score == best.max_score) {
            best.witnesses.push_back(s);
        }
    }
    best.multiplicity = Multiplicity::exact(best.witnesses.size());
    return best;
}

inline SignOptimum optimize_linear(const ProductModel& model) {
    const StandardizedRatios ratios = standardized_ratios(model);
    const std::size_t n = model.n();

    SignPattern base(n, +1);
    int nonzero_sign_product = +1;
    for (std::size_t i = 0; i < n; ++i) {
        if (ratios.a[i] < 0.0) {
            base[i] = -1;
            nonzero_sign_product = -nonzero_sign_product;
        }
    }

    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_sum += std::fabs(ratios.a[i]);

    SignOptimum out;
    if (ratios.k >= 1) {
        // Zero coordinates are free up to one parity constraint.
        out.max_score = abs_sum;
        out.multiplicity = Multiplicity::power_of_two(ratios.k - 1);
        SignPattern witness = base;
        witness[ratios.zero_set.back()] = static_cast<std::int8_t>(nonzero_sign_product);
        out.witnesses.push_back(std::move(witness));
        return out;
    }

    if (nonzero_sign_product > 0) {
        out.max_score = abs_sum;
        out.multiplicity = Multiplicity::exact(1);
        out.witnesses.push_back(base);
        return out;
    }

    // All-positive score pattern is inadmissible: flip one minimal-|a| sign.
    double min_abs = std::fabs(ratios.a[0]);
    for (std::size_t i = 1; i < n; ++i) min_abs = std::min(min_abs, std::fabs(ratios.a[i]));
    std::uint64_t ties = 0;
    std::size_t first_min = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(ratios.a[i]) == min_abs) {
            if (ties == 0) first_min = i;
            ++ties;
        }
    }
    out.max_score = abs_sum - 2.0 * min_abs;
    out.multiplicity = Multiplicity::exact(ties);
    SignPattern witness = base;
    witness[first_min] = static_cast<std::int8_t>(-witness[first_min]);
    out.witnesses.push_back(std::move(witness));
    return out;
}

}  // namespace prodtail::signpat
