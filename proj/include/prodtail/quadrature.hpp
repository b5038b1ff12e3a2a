#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "prodtail/asymptotic.hpp"
#include "prodtail/estimate.hpp"
#include "prodtail/logspace.hpp"
#include "prodtail/model.hpp"
#include "prodtail/normal.hpp"

// Ground-truth tail probabilities for small n by the one-factor recursion
//   P(prod_{i<=m} X_i > t) = int_{u>0} f_m(u) P(prod_{i<m} > t/u) du
//                          + int_{u<0} f_m(u) P(prod_{i<m} < t/u) du.
// Everything runs in log space: integrals are adaptive Gauss-Kronrod sums
// of exp(phi(v)) after the substitution u = +/- e^v, and the inner tails of
// intermediate levels are tabulated on log-spaced grids and interpolated.
// The reachable range of every level is sized from an exponent budget so
// that clamped contributions are provably below the reported accuracy.

namespace prodtail::oracle {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double truncation_radius = 12.0;  // minimum half-width of the outer window, sigma units
    int max_depth = 60;               // refinement rounds / panel split depth
    int grid_size = 4096;             // nodes per tabulated branch
};

namespace qdetail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double gk_weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct LogIntegral {
    double log_value = neg_inf;
    double log_error = neg_inf;  // absolute error estimate, in log scale
};

struct Panel {
    double lo = 0.0, hi = 0.0;
    int depth = 0;
    double log_val = neg_inf;
    double log_err = neg_inf;
};

template <class F>
inline void gk15_panel(F&& phi, Panel& p) {
    const double c = 0.5 * (p.lo + p.hi);
    const double h = 0.5 * (p.hi - p.lo);
    double vals[15];
    double peak = neg_inf;
    for (int k = 0; k < 7; ++k) {
        vals[2 * k] = phi(c - h * gk_nodes[k]);
        vals[2 * k + 1] = phi(c + h * gk_nodes[k]);
        peak = std::max(peak, std::max(vals[2 * k], vals[2 * k + 1]));
    }
    vals[14] = phi(c);
    peak = std::max(peak, vals[14]);
    if (peak == neg_inf) {
        p.log_val = neg_inf;
        p.log_err = neg_inf;
        return;
    }
    double kron = 0.0;
    for (int k = 0; k < 7; ++k) {
        kron += gk_weights[k] * (std::exp(vals[2 * k] - peak) + std::exp(vals[2 * k + 1] - peak));
    }
    const double center = std::exp(vals[14] - peak);
    kron += gk_weights[7] * center;
    // Gauss subset: Kronrod nodes 1, 3, 5 plus the center.
    double gauss = gauss_weights[3] * center;
    for (int k = 0; k < 3; ++k) {
        const int idx = 2 * k + 1;
        gauss += gauss_weights[k] *
                 (std::exp(vals[2 * idx] - peak) + std::exp(vals[2 * idx + 1] - peak));
    }
    p.log_val = peak + std::log(h * kron);
    const double diff = h * std::fabs(kron - gauss);
    p.log_err = diff > 0.0 ? peak + std::log(diff) : neg_inf;
}

struct Effort {
    int scan_points = 512;
    double fine_cap = 0.02;    // panel width near the scanned peak
    double coarse_cap = 0.5;   // panel width elsewhere
    int panel_cap = 4000;
    int max_rounds = 16;       // refinement rounds for smooth integrands
};

inline constexpr Effort node_effort{512, 0.02, 0.5, 2000, 16};
inline constexpr Effort top_effort{4096, 0.01, 0.25, 8000, 60};

// Adaptive integral of exp(phi(v)) dv over [v_start, v_hi], where phi decays
// left of v_start at unit slope or faster (Jacobian-dominated regime); the
// window is extended leftward until the integrand is provably dead.
template <class F>
inline LogIntegral integrate_log(F&& phi, double v_start, double v_hi, double rel_tol,
                                 int max_depth, const Effort& effort) {
    constexpr double keep_window = 120.0;
    if (!(v_hi > v_start)) return {};

    std::vector<double> vs, fs;
    const int m = effort.scan_points;
    const double step = (v_hi - v_start) / m;
    vs.reserve(m + 1);
    fs.reserve(m + 1);
    for (int i = 0; i <= m; ++i) {
        const double v = v_start + i * step;
        vs.push_back(v);
        fs.push_back(phi(v));
    }
    double best = neg_inf;
    for (double f : fs) best = std::max(best, f);
    if (best == neg_inf) return {};

    // Left extension: coarse blocks until the edge falls out of the window.
    std::vector<double> pre_v, pre_f;
    double edge = v_start;
    double edge_val = fs.front();
    const double extension_floor = v_start - 40.0 * (std::fabs(best) + keep_window);
    while (edge_val > best - keep_window && edge > extension_floor) {
        for (int i = 1; i <= 16; ++i) {
            const double v = edge - 0.5 * i;
            pre_v.push_back(v);
            pre_f.push_back(phi(v));
        }
        edge -= 8.0;
        edge_val = pre_f.back();
    }
    if (!pre_v.empty()) {
        std::reverse(pre_v.begin(), pre_v.end());
        std::reverse(pre_f.begin(), pre_f.end());
        pre_v.insert(pre_v.end(), vs.begin(), vs.end());
        pre_f.insert(pre_f.end(), fs.begin(), fs.end());
        vs.swap(pre_v);
        fs.swap(pre_f);
    }

    // Panels from scan intervals that clear the keep window. Fine panel
    // widths are applied only where a narrow feature can hide: next to the
    // global argmax, or where the scan shows strong curvature; smooth
    // plateaus keep coarse panels and rely on the error estimator.
    std::vector<Panel> panels;
    const double keep = best - keep_window;
    const double high = best - 45.0;
    std::size_t arg_best = 0;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        if (fs[k] == best) arg_best = k;
    }
    const double v_best = vs[arg_best];
    auto curvature_flag = [&](std::size_t k) {
        if (k == 0 || k + 1 >= fs.size()) return false;
        if (fs[k - 1] == neg_inf || fs[k] == neg_inf || fs[k + 1] == neg_inf) return true;
        return std::fabs(fs[k - 1] - 2.0 * fs[k] + fs[k + 1]) > 0.25;
    };
    std::size_t i = 0;
    while (i + 1 < vs.size()) {
        if (std::max(fs[i], fs[i + 1]) < keep) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < vs.size() && std::max(fs[j], fs[j + 1]) >= keep) ++j;
        // run [i, j]; emit panels with local width caps
        double pos = vs[i];
        std::size_t node = i;
        while (pos < vs[j]) {
            while (node + 1 < j && vs[node + 1] <= pos) ++node;
            const bool tall = std::max(fs[node], fs[std::min(node + 1, j)]) >= high;
            const bool narrow = std::fabs(pos - v_best) <= 1.5 || curvature_flag(node) ||
                                curvature_flag(std::min(node + 1, j));
            const double cap = (tall && narrow) ? effort.fine_cap : effort.coarse_cap;
            Panel p;
            p.lo = pos;
            p.hi = std::min(vs[j], pos + cap);
            gk15_panel(phi, p);
            panels.push_back(p);
            pos = p.hi;
        }
        i = j;
    }
    if (panels.empty()) return {};

    auto lse_panels = [&](auto proj) {
        double acc = neg_inf;
        for (const Panel& p : panels) acc = log_add(acc, proj(p));
        return acc;
    };

    double total = neg_inf;
    double err = neg_inf;
    const int rounds = std::min(max_depth, effort.max_rounds);
    for (int round = 0; round < rounds; ++round) {
        total = lse_panels([](const Panel& p) { return p.log_val; });
        err = lse_panels([](const Panel& p) { return p.log_err; });
        if (err <= total + std::log(rel_tol) - 0.7) break;
        if (static_cast<int>(panels.size()) >= effort.panel_cap) break;
        const double threshold =
            total + std::log(rel_tol) - std::log(2.0 * static_cast<double>(panels.size()));
        std::vector<Panel> next;
        next.reserve(panels.size() * 2);
        bool split_any = false;
        for (const Panel& p : panels) {
            if (p.log_err > threshold && p.depth < max_depth) {
                Panel a, b;
                a.lo = p.lo;
                a.hi = 0.5 * (p.lo + p.hi);
                b.lo = a.hi;
                b.hi = p.hi;
                a.depth = b.depth = p.depth + 1;
                gk15_panel(phi, a);
                gk15_panel(phi, b);
                next.push_back(a);
                next.push_back(b);
                split_any = true;
            } else {
                next.push_back(p);
            }
        }
        panels.swap(next);
        if (!split_any) break;
    }
    total = lse_panels([](const Panel& p) { return p.log_val; });
    err = lse_panels([](const Panel& p) { return p.log_err; });

    // Account for the pruned scan mass and the left edge.
    const double span = vs.back() - vs.front();
    double neglected = best - keep_window + std::log(std::max(span, 1.0));
    neglected = log_add(neglected, fs.front());  // unit-slope left tail bound
    return {total, log_add(err, neglected)};
}

// Interface of one recursion level: log P(prefix > y) and log P(prefix < y).
class LevelEvaluator {
public:
    virtual ~LevelEvaluator() = default;
    virtual double upper(double y) const = 0;
    virtual double lower(double y) const = 0;
};

class NormalLevel final : public LevelEvaluator {
public:
    NormalLevel(double mu, double sigma) : mu_(mu), sigma_(sigma) {}
    double upper(double y) const override { return norm_log_sf((y - mu_) / sigma_); }
    double lower(double y) const override { return norm_log_cdf((y - mu_) / sigma_); }

private:
    double mu_, sigma_;
};

// One tail integral of the recursion for factor `idx`: the u > 0 half when
// positive_u, otherwise the u < 0 half mapped by u = -e^v.
template <bool kUpper>
inline LogIntegral half_integral(const ProductModel& model, std::size_t idx,
                                 const LevelEvaluator& inner, double t, bool positive_u,
                                 double budget, const QuadratureConfig& cfg,
                                 const Effort& effort) {
    const double mu = model.mu[idx];
    const double sigma = model.sigma[idx];
    const double log_norm = -std::log(sigma) - half_log_two_pi;
    const double reach = std::sqrt(2.6 * budget) + cfg.truncation_radius;
    const double v_hi = std::log(std::fabs(mu) + sigma * reach);
    const double v_start = std::log(sigma) - 20.7;  // sigma * 1e-9

    auto phi = [&](double v) {
        const double u = positive_u ? std::exp(v) : -std::exp(v);
        const double z = (u - mu) / sigma;
        const double log_pdf = log_norm - 0.5 * z * z;
        const double y = (t == 0.0) ? 0.0 : t * std::exp(-v) * (positive_u ? 1.0 : -1.0);
        double inner_log;
        if (kUpper) {
            inner_log = positive_u ? inner.upper(y) : inner.lower(y);
        } else {
            inner_log = positive_u ? inner.lower(y) : inner.upper(y);
        }
        return log_pdf + v + inner_log;
    };
    return integrate_log(phi, v_start, v_hi, cfg.rel_tol, cfg.max_depth, effort);
}

struct RecursionResult {
    double log_value = neg_inf;
    double log_error = neg_inf;
};

// log P(prod_{i<=idx} X_i > t) (upper) or < t (lower), with `inner`
// describing the prefix product up to idx-1.
inline RecursionResult eval_level(const ProductModel& model, std::size_t idx,
                                  const LevelEvaluator& inner, double t, bool want_upper,
                                  double budget, const QuadratureConfig& cfg,
                                  const Effort& effort) {
    LogIntegral pos, neg;
    if (want_upper) {
        pos = half_integral<true>(model, idx, inner, t, true, budget, cfg, effort);
        neg = half_integral<true>(model, idx, inner, t, false, budget, cfg, effort);
    } else {
        pos = half_integral<false>(model, idx, inner, t, true, budget, cfg, effort);
        neg = half_integral<false>(model, idx, inner, t, false, budget, cfg, effort);
    }
    RecursionResult out;
    out.log_value = log_add(pos.log_value, neg.log_value);
    const double trunc = std::log(2.0) + norm_log_sf(std::sqrt(2.6 * budget));
    out.log_error = log_add(log_add(pos.log_error, neg.log_error), trunc);
    return out;
}

// Tabulated level: branch grids over q = log|y| with cubic Hermite
// interpolation, a linear patch across y ~ 0, and budget-justified clamps
// beyond the grid.
class TableLevel final : public LevelEvaluator {
public:
    struct Branch {
        double q_min = 0.0, dq = 1.0;
        std::vector<double> val;

        double eval(double q) const {
            const double s = (q - q_min) / dq;
            const std::size_t count = val.size();
            if (s <= 0.0) return val.front();
            if (s >= static_cast<double>(count - 1)) return val.back();
            std::size_t j = static_cast<std::size_t>(s);
            if (j + 1 >= count) j = count - 2;
            const double u = s - static_cast<double>(j);
            const double slope0 = slope(j);
            const double slope1 = slope(j + 1);
            const double u2 = u * u;
            const double u3 = u2 * u;
            return (2.0 * u3 - 3.0 * u2 + 1.0) * val[j] + (u3 - 2.0 * u2 + u) * slope0 +
                   (-2.0 * u3 + 3.0 * u2) * val[j + 1] + (u3 - u2) * slope1;
        }

        double slope(std::size_t j) const {  // per-index units, 4th order inside
            const std::size_t count = val.size();
            if (j == 0) return val[1] - val[0];
            if (j + 1 == count) return val[count - 1] - val[count - 2];
            if (j < 2 || j + 2 >= count) return 0.5 * (val[j + 1] - val[j - 1]);
            return (val[j - 2] - 8.0 * val[j - 1] + 8.0 * val[j + 1] - val[j + 2]) / 12.0;
        }
    };

    double y_min = 0.0, y_max = 0.0;
    Branch upper_pos, upper_neg, lower_pos, lower_neg;

    double upper(double y) const override {
        if (y >= y_max) return neg_inf;
        if (y <= -y_max) return upper_neg.val.back();  // ~ log 1, budget-deep
        if (std::fabs(y) < y_min) {
            return blend(y, upper_neg.val.front(), upper_pos.val.front());
        }
        return y > 0.0 ? upper_pos.eval(std::log(y)) : upper_neg.eval(std::log(-y));
    }

    double lower(double y) const override {
        if (y <= -y_max) return neg_inf;
        if (y >= y_max) return lower_pos.val.back();
        if (std::fabs(y) < y_min) {
            return blend(y, lower_neg.val.front(), lower_pos.val.front());
        }
        return y > 0.0 ? lower_pos.eval(std::log(y)) : lower_neg.eval(std::log(-y));
    }

private:
    double blend(double y, double at_minus, double at_plus) const {
        const double w = (y + y_min) / (2.0 * y_min);
        return at_minus + w * (at_plus - at_minus);
    }
};

struct BuiltTable {
    TableLevel table;
    // |interpolated - direct| at off-grid points, with the direct log value
    // they were measured at; probes deeper than the final result by a wide
    // margin cannot influence it and are discounted later.
    std::vector<std::pair<double, double>> probes;  // (log value, abs log error)
};

// Tabulate the tail of the prefix of length idx+1, using `inner` for the
// prefix of length idx.
inline BuiltTable build_table(const ProductModel& model, std::size_t idx,
                              const LevelEvaluator& inner, double budget,
                              const QuadratureConfig& cfg) {
    const std::size_t len = idx + 1;  // factors in this prefix
    double scale = 1.0;
    double abs_score = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        scale *= model.sigma[i];
        abs_score += std::fabs(model.mu[i] / model.sigma[i]);
    }
    // Reach rho solving (len/2) rho^2 - abs_score rho = 1.2 budget, so the
    // clamped region is at least 1.2*budget deep in the exponent.
    const double l = static_cast<double>(len);
    const double rho =
        (abs_score + std::sqrt(abs_score * abs_score + 2.4 * l * budget)) / l;

    BuiltTable out;
    TableLevel& tab = out.table;
    tab.y_min = scale * 1e-12;
    tab.y_max = scale * std::pow(std::max(rho, 4.0), l);

    const int nodes = std::max(cfg.grid_size, 64);
    const double q_min = std::log(tab.y_min);
    const double q_hi = std::log(tab.y_max);
    const double dq = (q_hi - q_min) / static_cast<double>(nodes - 1);

    auto fill = [&](TableLevel::Branch& branch, bool positive_y, bool upper_tail) {
        branch.q_min = q_min;
        branch.dq = dq;
        branch.val.resize(nodes);
        for (int i = 0; i < nodes; ++i) {
            const double y = (positive_y ? 1.0 : -1.0) * std::exp(q_min + i * dq);
            branch.val[i] =
                eval_level(model, idx, inner, y, upper_tail, budget, cfg, node_effort).log_value;
        }
    };
    fill(tab.upper_pos, true, true);
    fill(tab.upper_neg, false, true);
    fill(tab.lower_pos, true, false);
    fill(tab.lower_neg, false, false);

    // Probe interpolation error at off-grid points.
    const int probes = 12;
    for (int k = 0; k < probes; ++k) {
        const double q = q_min + (q_hi - q_min) * (k + 0.5) / probes;
        for (bool positive : {true, false}) {
            const double y = (positive ? 1.0 : -1.0) * std::exp(q);
            const double direct_u =
                eval_level(model, idx, inner, y, true, budget, cfg, node_effort).log_value;
            const double direct_l =
                eval_level(model, idx, inner, y, false, budget, cfg, node_effort).log_value;
            if (direct_u > neg_inf) {
                out.probes.emplace_back(direct_u, std::fabs(tab.upper(y) - direct_u));
            }
            if (direct_l > neg_inf) {
                out.probes.emplace_back(direct_l, std::fabs(tab.lower(y) - direct_l));
            }
        }
    }
    return out;
}

}  // namespace qdetail

// Tail probability P(prod X_i > x) by recursive log-space quadrature.
// Exact-target oracle for n <= 4.
inline TailEstimate tail_quadrature(const ProductModel& model, double x,
                                    QuadratureConfig cfg = {}) {
    const std::size_t n = model.n();
    if (n > 4) {
        throw Error(ErrorCode::n_too_large_for_quadrature,
                    "recursive quadrature supports n <= 4, got " + std::to_string(n));
    }
    if (!(cfg.rel_tol > 0.0) || cfg.truncation_radius < 8.0) {
        throw Error(ErrorCode::usage, "rel_tol must be positive and truncation_radius >= 8");
    }

    if (n == 1) {
        TailEstimate est =
            make_estimate(norm_log_sf((x - model.mu[0]) / model.sigma[0]), Method::quadrature);
        est.rel_accuracy = 1e-14;
        return est;
    }

    // Exponent budget drives every window and clamp; sized so that anything
    // clamped sits far below the achievable accuracy at the requested depth.
    double balanced = 1.0;
    if (std::fabs(x) > 0.0) {
        balanced = std::max(1.0, asymptotic::balanced_scale(model, std::fabs(x)));
    }
    const double budget =
        2.0 * (static_cast<double>(n) * balanced * balanced + sum_ratio_squares(model)) + 400.0;

    using qdetail::BuiltTable;
    using qdetail::LevelEvaluator;
    using qdetail::NormalLevel;

    NormalLevel base(model.mu[0], model.sigma[0]);
    std::vector<BuiltTable> tables;
    const LevelEvaluator* inner = &base;
    for (std::size_t idx = 1; idx + 1 < n; ++idx) {
        tables.push_back(qdetail::build_table(model, idx, *inner, budget, cfg));
        inner = &tables.back().table;
    }

    const qdetail::RecursionResult top = qdetail::eval_level(
        model, n - 1, *inner, x, true, budget, cfg, qdetail::top_effort);

    if (top.log_value == neg_inf) {
        throw Error(ErrorCode::accuracy_not_reached, "integral vanished at this depth");
    }
    // Interpolation probes matter only where the inner tail can reach the
    // final value; deeper probes are exponentially discounted.
    double table_error = 0.0;
    for (const auto& built : tables) {
        double level_err = 0.0;
        for (const auto& [value, err] : built.probes) {
            if (value >= top.log_value - 45.0) {
                level_err = std::max(level_err, err);
            } else {
                level_err = std::max(level_err, 1e-12);
            }
        }
        table_error += level_err;
    }
    const double quad_rel = std::exp(top.log_error - top.log_value);
    const double rel_accuracy = quad_rel + 3.0 * table_error + 1e-13;
    const double promised = std::max(1e-8, cfg.rel_tol * 10.0);
    if (!(rel_accuracy <= promised) || top.log_value < -0.4 * budget) {
        throw Error(ErrorCode::accuracy_not_reached,
                    "estimated relative accuracy " + std::to_string(rel_accuracy) +
                        " exceeds the promised " + std::to_string(promised));
    }

    TailEstimate est = make_estimate(std::min(top.log_value, 0.0), Method::quadrature);
    est.rel_accuracy = rel_accuracy;
    return est;
}

}  // namespace prodtail::oracle
