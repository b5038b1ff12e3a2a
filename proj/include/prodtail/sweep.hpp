#pragma once

#include <cmath>
#include <cstdio>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prodtail/asymptotic.hpp"
#include "prodtail/estimate.hpp"
#include "prodtail/model.hpp"
#include "prodtail/model_io.hpp"
#include "prodtail/oracle.hpp"
#include "prodtail/saddle.hpp"

// Accuracy-vs-threshold comparison grids. One row per grid point with the
// analytic tiers, an auto-selected ground-truth oracle, and relative errors
// against it. CSV output is byte-stable for fixed inputs and seeds.

namespace prodtail::sweep {

enum class Spacing { geometric, linear };

struct SweepSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    int points = 0;
    Spacing spacing = Spacing::geometric;
    std::set<Method> tiers;
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t seed = 0;
    double quad_log_floor = -700.0;  // auto-oracle switches to tilted MC below
};

struct SweepRow {
    double x = 0.0;
    double r = 0.0;
    std::optional<double> log10_theorem1;
    std::optional<double> log10_saddle_sum;
    std::optional<double> log10_oracle;
    std::string oracle_method;
    std::optional<double> mc_stderr_rel;
    std::optional<double> rel_err_theorem1;
    std::optional<double> rel_err_saddle_sum;
};

struct SweepResult {
    ProductModel model;
    SweepSpec spec;
    std::vector<SweepRow> rows;
};

inline constexpr double ln10 = 2.302585092994045684017991454684;

namespace detail {

inline std::vector<double> make_grid(const SweepSpec& spec) {
    std::vector<double> xs(spec.points);
    if (spec.spacing == Spacing::geometric) {
        const double l0 = std::log(spec.x_min);
        const double l1 = std::log(spec.x_max);
        for (int i = 0; i < spec.points; ++i) {
            xs[i] = std::exp(l0 + (l1 - l0) * i / (spec.points - 1));
        }
    } else {
        for (int i = 0; i < spec.points; ++i) {
            xs[i] = spec.x_min + (spec.x_max - spec.x_min) * i / (spec.points - 1);
        }
    }
    xs.front() = spec.x_min;
    xs.back() = spec.x_max;
    return xs;
}

// Cheap regime predictor for the oracle auto-selection; independent of the
// estimators under test.
inline double predicted_log_p(const ProductModel& model, double x) {
    const double r = asymptotic::balanced_scale(model, x);
    const double best = signpat::optimize_linear(model).max_score;
    return -0.5 * static_cast<double>(model.n()) * r * r + std::fabs(best) * r + 10.0;
}

inline SweepRow evaluate_point(const ProductModel& model, const SweepSpec& spec, double x) {
    SweepRow row;
    row.x = x;
    row.r = asymptotic::balanced_scale(model, x);

    if (spec.tiers.count(Method::theorem1)) {
        row.log10_theorem1 = asymptotic::theorem1_estimate(model, x).first.log_p / ln10;
    }
    if (spec.tiers.count(Method::saddle_sum)) {
        row.log10_saddle_sum = saddle::saddle_sum_estimate(model, x).log_p / ln10;
    }

    const bool want_quad = spec.tiers.count(Method::quadrature) > 0;
    const bool want_tilt = spec.tiers.count(Method::mc_importance) > 0;
    const bool want_plain = spec.tiers.count(Method::mc_plain) > 0;
    std::optional<TailEstimate> oracle_est;
    if (want_quad && model.n() <= 4 && predicted_log_p(model, x) >= spec.quad_log_floor) {
        oracle_est = oracle::tail_quadrature(model, x);
    } else if (want_tilt || want_plain) {
        oracle::McConfig cfg;
        cfg.n_samples = spec.mc_samples;
        cfg.seed = spec.seed;
        cfg.proposal = want_tilt ? oracle::McConfig::Proposal::saddle_tilt
                                 : oracle::McConfig::Proposal::plain;
        oracle_est = oracle::mc_estimate(model, x, cfg);
    } else if (want_quad) {
        oracle_est = oracle::tail_quadrature(model, x);
    }

    if (oracle_est) {
        row.log10_oracle = oracle_est->log_p / ln10;
        row.oracle_method = method_name(oracle_est->method);
        row.mc_stderr_rel = oracle_est->stderr_rel;
        if (row.log10_theorem1) {
            row.rel_err_theorem1 =
                std::fabs(std::exp((*row.log10_theorem1 - *row.log10_oracle) * ln10) - 1.0);
        }
        if (row.log10_saddle_sum) {
            row.rel_err_saddle_sum =
                std::fabs(std::exp((*row.log10_saddle_sum - *row.log10_oracle) * ln10) - 1.0);
        }
    }
    return row;
}

}  // namespace detail

inline SweepResult run_sweep(const ProductModel& model, const SweepSpec& spec) {
    if (spec.tiers.empty()) {
        throw Error(ErrorCode::usage, "sweep needs at least one tier");
    }
    if (!(spec.x_min > 0.0) || !(spec.x_min < spec.x_max) || spec.points < 2) {
        throw Error(ErrorCode::usage, "sweep needs 0 < x_min < x_max and points >= 2");
    }
    const std::vector<double> xs = detail::make_grid(spec);

    std::vector<std::future<SweepRow>> futures;
    futures.reserve(xs.size());
    for (double x : xs) {
        futures.push_back(std::async(std::launch::async, [&model, &spec, x] {
            return detail::evaluate_point(model, spec, x);
        }));
    }
    SweepResult out{model, spec, {}};
    out.rows.reserve(xs.size());
    for (auto& f : futures) out.rows.push_back(f.get());
    return out;
}

inline std::string format_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

inline std::string tiers_string(const std::set<Method>& tiers) {
    std::string out;
    for (Method m : tiers) {
        if (!out.empty()) out += ',';
        out += method_name(m);
    }
    return out;
}

inline std::string to_csv(const SweepResult& result) {
    std::string out;
    out += "# model: " + model_to_json_text(result.model) + "\n";
    out += "# seed: " + std::to_string(result.spec.seed) + "\n";
    out += "# samples: " + std::to_string(result.spec.mc_samples) + "\n";
    out += "# spacing: " +
           std::string(result.spec.spacing == Spacing::geometric ? "geometric" : "linear") + "\n";
    out += "# tiers: " + tiers_string(result.spec.tiers) + "\n";
    out += "x,r,log10_theorem1,log10_saddle_sum,log10_oracle,oracle_method,mc_stderr_rel,"
           "rel_err_theorem1,rel_err_saddle_sum\n";
    for (const SweepRow& row : result.rows) {
        out += format_double(row.x) + ',' + format_double(row.r) + ',';
        out += format_cell(row.log10_theorem1) + ',';
        out += format_cell(row.log10_saddle_sum) + ',';
        out += format_cell(row.log10_oracle) + ',';
        out += row.oracle_method + ',';
        out += format_cell(row.mc_stderr_rel) + ',';
        out += format_cell(row.rel_err_theorem1) + ',';
        out += format_cell(row.rel_err_saddle_sum) + '\n';
    }
    return out;
}

inline std::string to_json(const SweepResult& result) {
    std::string out = "{\"model\":" + model_to_json_text(result.model);
    out += ",\"seed\":" + std::to_string(result.spec.seed);
    out += ",\"samples\":" + std::to_string(result.spec.mc_samples);
    out += ",\"spacing\":\"" +
           std::string(result.spec.spacing == Spacing::geometric ? "geometric" : "linear") + "\"";
    out += ",\"tiers\":\"" + tiers_string(result.spec.tiers) + "\"";
    out += ",\"rows\":[";
    bool first_row = true;
    for (const SweepRow& row : result.rows) {
        if (!first_row) out += ',';
        first_row = false;
        out += "{\"x\":" + format_double(row.x) + ",\"r\":" + format_double(row.r);
        auto field = [&out](const char* name, const std::optional<double>& v) {
            out += std::string(",\"") + name + "\":";
            out += v ? format_double(*v) : std::string("null");
        };
        field("log10_theorem1", row.log10_theorem1);
        field("log10_saddle_sum", row.log10_saddle_sum);
        field("log10_oracle", row.log10_oracle);
        out += ",\"oracle_method\":\"" + row.oracle_method + "\"";
        field("mc_stderr_rel", row.mc_stderr_rel);
        field("rel_err_theorem1", row.rel_err_theorem1);
        field("rel_err_saddle_sum", row.rel_err_saddle_sum);
        out += '}';
    }
    out += "]}";
    return out;
}

}  // namespace prodtail::sweep
