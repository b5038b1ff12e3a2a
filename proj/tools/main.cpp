// prodtail: tail probabilities of products of independent normal factors.
//
// Subcommands: approx, oracle, mc, sweep, signopt, validate.
// Exit codes: 0 success, 2 usage, 3 input, 4 numerical regime, 5 internal.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "prodtail/model_io.hpp"
#include "prodtail/prodtail.hpp"
#include "prodtail/selfcheck.hpp"
#include "prodtail/sweep.hpp"

namespace {

using namespace prodtail;

std::string fmt17(double v) { return format_double(v); }

std::string json_opt(const std::optional<double>& v) {
    return v ? fmt17(*v) : std::string("null");
}

void print_estimate_text(const TailEstimate& est) {
    std::printf("method: %s\n", method_name(est.method));
    std::printf("log_p: %s\n", fmt17(est.log_p).c_str());
    std::printf("log10_p: %s\n", fmt17(est.log_p / sweep::ln10).c_str());
    if (est.p) {
        std::printf("p: %s\n", fmt17(*est.p).c_str());
    } else {
        std::printf("p: underflow\n");
    }
    if (est.stderr_rel) std::printf("stderr_rel: %s\n", fmt17(*est.stderr_rel).c_str());
    if (est.stderr_linear) std::printf("stderr: %s\n", fmt17(*est.stderr_linear).c_str());
    if (est.rel_accuracy) std::printf("rel_accuracy: %s\n", fmt17(*est.rel_accuracy).c_str());
    if (est.n_samples) std::printf("n_samples: %llu\n", (unsigned long long)*est.n_samples);
    if (est.seed) std::printf("seed: %llu\n", (unsigned long long)*est.seed);
}

std::string estimate_json_fields(const TailEstimate& est) {
    std::string out;
    out += "\"method\":\"" + std::string(method_name(est.method)) + "\"";
    out += ",\"log_p\":" + fmt17(est.log_p);
    out += ",\"log10_p\":" + fmt17(est.log_p / sweep::ln10);
    out += ",\"p\":" + json_opt(est.p);
    out += ",\"stderr_rel\":" + json_opt(est.stderr_rel);
    out += ",\"stderr\":" + json_opt(est.stderr_linear);
    out += ",\"rel_accuracy\":" + json_opt(est.rel_accuracy);
    out += ",\"n_samples\":";
    out += est.n_samples ? std::to_string(*est.n_samples) : std::string("null");
    out += ",\"seed\":";
    out += est.seed ? std::to_string(*est.seed) : std::string("null");
    return out;
}

void print_breakdown_text(const asymptotic::AsymptoticBreakdown& bd) {
    std::printf("r: %s\n", fmt17(bd.r).c_str());
    std::printf("log_C: %s\n", fmt17(bd.log_c).c_str());
    std::printf("exp_quadratic: %s\n", fmt17(bd.exp_quadratic).c_str());
    std::printf("exp_linear: %s\n", fmt17(bd.exp_linear).c_str());
    std::printf("exp_const: %s\n", fmt17(bd.exp_const).c_str());
    std::printf("log_prefactor: %s\n", fmt17(bd.log_prefactor).c_str());
    std::printf("log_total: %s\n", fmt17(bd.log_total).c_str());
    std::printf("L_star: %s\n", fmt17(bd.optimum.max_score).c_str());
    std::printf("m_star: %llu\n", (unsigned long long)bd.optimum.multiplicity.count);
    std::printf("regime_warning: %s\n", bd.regime_warning ? "true" : "false");
}

std::string breakdown_json_fields(const asymptotic::AsymptoticBreakdown& bd) {
    std::string out;
    out += "\"r\":" + fmt17(bd.r);
    out += ",\"log_C\":" + fmt17(bd.log_c);
    out += ",\"exp_quadratic\":" + fmt17(bd.exp_quadratic);
    out += ",\"exp_linear\":" + fmt17(bd.exp_linear);
    out += ",\"exp_const\":" + fmt17(bd.exp_const);
    out += ",\"log_prefactor\":" + fmt17(bd.log_prefactor);
    out += ",\"log_total\":" + fmt17(bd.log_total);
    out += ",\"L_star\":" + fmt17(bd.optimum.max_score);
    out += ",\"m_star\":" + std::to_string(bd.optimum.multiplicity.count);
    out += ",\"regime_warning\":";
    out += bd.regime_warning ? "true" : "false";
    return out;
}

// Ground-truth auto-selection shared by `oracle` and sweeps: quadrature in
// its envelope, tilted MC beyond it.
TailEstimate ground_truth(const ProductModel& model, double x, std::uint64_t samples,
                          std::uint64_t seed) {
    const double predicted = sweep::detail::predicted_log_p(model, x);
    if (model.n() <= 4 && predicted >= -700.0) {
        return oracle::tail_quadrature(model, x);
    }
    oracle::McConfig cfg;
    cfg.n_samples = samples;
    cfg.seed = seed;
    cfg.proposal = oracle::McConfig::Proposal::saddle_tilt;
    return oracle::mc_estimate(model, x, cfg);
}

struct CommonArgs {
    std::string model_path;
    std::string format = "csv";
    double x = 0.0;
};

int run(int argc, char** argv) {
    CLI::App app{"tail probabilities of products of independent normal random variables"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string tier = "theorem1";
    std::string proposal = "plain";
    std::string spacing = "geometric";
    std::string out_path;
    std::string scope = "fast";
    std::vector<std::string> tier_list;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    double x_min = 1e2, x_max = 1e6;
    int points = 9;

    auto* approx = app.add_subcommand("approx", "single-point estimate with breakdown");
    approx->add_option("--model", args.model_path, "model file path")->required();
    approx->add_option("--x", args.x, "tail threshold")->required();
    approx->add_option("--tier", tier,
                       "theorem1|saddle_sum|quadrature|mc_plain|mc_importance");
    approx->add_option("--samples", samples, "MC sample count");
    approx->add_option("--seed", seed, "MC seed");
    approx->add_option("--format", args.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    auto* oracle_cmd = app.add_subcommand("oracle", "auto-selected ground-truth estimate");
    oracle_cmd->add_option("--model", args.model_path)->required();
    oracle_cmd->add_option("--x", args.x)->required();
    oracle_cmd->add_option("--samples", samples);
    oracle_cmd->add_option("--seed", seed);
    oracle_cmd->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate");
    mc->add_option("--model", args.model_path)->required();
    mc->add_option("--x", args.x)->required();
    mc->add_option("--samples", samples);
    mc->add_option("--seed", seed);
    mc->add_option("--proposal", proposal, "plain|saddle_tilt")
        ->check(CLI::IsMember({"plain", "saddle_tilt"}));
    mc->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "accuracy-vs-threshold comparison grid");
    sweep_cmd->add_option("--model", args.model_path)->required();
    sweep_cmd->add_option("--x-min", x_min);
    sweep_cmd->add_option("--x-max", x_max);
    sweep_cmd->add_option("--points", points);
    sweep_cmd->add_option("--spacing", spacing)->check(CLI::IsMember({"geometric", "linear"}));
    sweep_cmd->add_option("--tier", tier_list, "tier tag, repeatable")->delimiter(',');
    sweep_cmd->add_option("--samples", samples);
    sweep_cmd->add_option("--seed", seed);
    sweep_cmd->add_option("--out", out_path, "output file (default stdout)");
    sweep_cmd->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* signopt = app.add_subcommand("signopt", "optimal admissible sign pattern");
    signopt->add_option("--model", args.model_path)->required();
    signopt->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* validate = app.add_subcommand("validate", "run the invariant suites");
    validate->add_option("scope", scope, "fast|full");
    validate->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "error[usage]: %s\n", e.what());
        return 2;
    }
    const bool json = args.format == "json";

    if (validate->parsed()) {
        if (scope != "fast" && scope != "full") {
            throw Error(ErrorCode::usage, "scope must be fast or full, got " + scope);
        }
        const auto results =
            selfcheck::run_validation(scope == "fast" ? selfcheck::Scope::fast
                                                      : selfcheck::Scope::full);
        bool all_pass = true;
        if (json) {
            std::string out = "[";
            for (std::size_t i = 0; i < results.size(); ++i) {
                if (i) out += ',';
                out += "{\"name\":\"" + results[i].name + "\",\"pass\":";
                out += results[i].pass ? "true" : "false";
                out += ",\"detail\":\"" + results[i].detail + "\"}";
            }
            out += "]";
            std::printf("%s\n", out.c_str());
        }
        for (const auto& r : results) {
            if (!json) std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                                   r.detail.c_str());
            all_pass = all_pass && r.pass;
        }
        return all_pass ? 0 : 4;
    }

    const ProductModel model = load_model_file(args.model_path);

    if (signopt->parsed()) {
        const auto opt = signpat::optimize_linear(model);
        const std::string witness = signpat::pattern_string(opt.witnesses.front());
        if (json) {
            std::printf("{\"L_star\":%s,\"m_star\":%llu,\"witness\":\"%s\"}\n",
                        fmt17(opt.max_score).c_str(),
                        (unsigned long long)opt.multiplicity.count, witness.c_str());
        } else {
            std::printf("L_star: %s\n", fmt17(opt.max_score).c_str());
            std::printf("m_star: %llu\n", (unsigned long long)opt.multiplicity.count);
            std::printf("witness: %s\n", witness.c_str());
        }
        return 0;
    }

    if (approx->parsed()) {
        const auto method = method_from_name(tier);
        if (!method) throw Error(ErrorCode::usage, "unknown tier " + tier);
        TailEstimate est;
        std::optional<asymptotic::AsymptoticBreakdown> breakdown;
        switch (*method) {
            case Method::theorem1: {
                auto [e, bd] = asymptotic::theorem1_estimate(model, args.x);
                est = e;
                breakdown = std::move(bd);
                break;
            }
            case Method::saddle_sum:
                est = saddle::saddle_sum_estimate(model, args.x);
                break;
            case Method::quadrature:
                est = oracle::tail_quadrature(model, args.x);
                break;
            case Method::mc_plain:
            case Method::mc_importance: {
                oracle::McConfig cfg;
                cfg.n_samples = samples;
                cfg.seed = seed;
                cfg.proposal = *method == Method::mc_plain
                                   ? oracle::McConfig::Proposal::plain
                                   : oracle::McConfig::Proposal::saddle_tilt;
                est = oracle::mc_estimate(model, args.x, cfg);
                break;
            }
        }
        if (json) {
            std::string out = "{" + estimate_json_fields(est);
            if (breakdown) out += ",\"breakdown\":{" + breakdown_json_fields(*breakdown) + "}";
            out += "}";
            std::printf("%s\n", out.c_str());
        } else {
            print_estimate_text(est);
            if (breakdown) print_breakdown_text(*breakdown);
        }
        return 0;
    }

    if (oracle_cmd->parsed()) {
        const TailEstimate est = ground_truth(model, args.x, samples, seed);
        if (json) {
            std::printf("{%s}\n", estimate_json_fields(est).c_str());
        } else {
            print_estimate_text(est);
        }
        return 0;
    }

    if (mc->parsed()) {
        oracle::McConfig cfg;
        cfg.n_samples = samples;
        cfg.seed = seed;
        cfg.proposal = proposal == "plain" ? oracle::McConfig::Proposal::plain
                                           : oracle::McConfig::Proposal::saddle_tilt;
        const TailEstimate est = oracle::mc_estimate(model, args.x, cfg);
        if (json) {
            std::printf("{%s}\n", estimate_json_fields(est).c_str());
        } else {
            print_estimate_text(est);
        }
        return 0;
    }

    if (sweep_cmd->parsed()) {
        sweep::SweepSpec spec;
        spec.x_min = x_min;
        spec.x_max = x_max;
        spec.points = points;
        spec.spacing = spacing == "linear" ? sweep::Spacing::linear : sweep::Spacing::geometric;
        spec.mc_samples = samples;
        spec.seed = seed;
        if (tier_list.empty()) {
            tier_list = {"theorem1", "saddle_sum", "quadrature", "mc_importance"};
        }
        for (const auto& t : tier_list) {
            const auto method = method_from_name(t);
            if (!method) throw Error(ErrorCode::usage, "unknown tier " + t);
            spec.tiers.insert(*method);
        }
        const sweep::SweepResult result = sweep::run_sweep(model, spec);
        const std::string text = json ? sweep::to_json(result) + "\n" : sweep::to_csv(result);
        if (out_path.empty()) {
            std::fputs(text.c_str(), stdout);
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw Error(ErrorCode::model_file_invalid, "cannot write " + out_path);
            out << text;
        }
        return 0;
    }

    throw Error(ErrorCode::usage, "no subcommand selected");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const prodtail::Error& e) {
        std::fprintf(stderr, "error[%s]: %s\n", e.tag(), e.what());
        return prodtail::error_exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[internal]: %s\n", e.what());
        return 5;
    }
}
