#include <doctest.h>

#include <cmath>
#include <string>

#include "prodtail/sweep.hpp"

using namespace prodtail;

namespace {

ProductModel reference_model() {
    return validate_model({1.0, 0.7, -0.4, 1.3}, {1.0, 1.2, 1.5, 0.9});
}

sweep::SweepSpec analytic_spec() {
    sweep::SweepSpec spec;
    spec.x_min = 1e2;
    spec.x_max = 1e4;
    spec.points = 5;
    spec.tiers = {Method::theorem1, Method::saddle_sum};
    return spec;
}

}  // namespace

TEST_CASE("sweep validates its spec") {
    sweep::SweepSpec spec = analytic_spec();
    spec.tiers.clear();
    CHECK_THROWS_AS(sweep::run_sweep(reference_model(), spec), Error);
    spec = analytic_spec();
    spec.points = 1;
    CHECK_THROWS_AS(sweep::run_sweep(reference_model(), spec), Error);
    spec = analytic_spec();
    spec.x_min = 10.0;
    spec.x_max = 5.0;
    CHECK_THROWS_AS(sweep::run_sweep(reference_model(), spec), Error);
}

TEST_CASE("analytic-only sweep leaves oracle cells empty") {
    const auto result = sweep::run_sweep(reference_model(), analytic_spec());
    REQUIRE(result.rows.size() == 5);
    CHECK(result.rows.front().x == 1e2);
    CHECK(result.rows.back().x == 1e4);
    for (const auto& row : result.rows) {
        CHECK(row.log10_theorem1);
        CHECK(row.log10_saddle_sum);
        CHECK(!row.log10_oracle);
        CHECK(row.oracle_method.empty());
        CHECK(!row.rel_err_theorem1);
    }
}

TEST_CASE("geometric and linear grids hit the endpoints") {
    sweep::SweepSpec spec = analytic_spec();
    spec.spacing = sweep::Spacing::linear;
    const auto result = sweep::run_sweep(reference_model(), spec);
    CHECK(result.rows[1].x == doctest::Approx(1e2 + (1e4 - 1e2) / 4.0).epsilon(1e-15));
}

TEST_CASE("csv output is byte-stable with the mandated header") {
    const auto r1 = sweep::run_sweep(reference_model(), analytic_spec());
    const auto r2 = sweep::run_sweep(reference_model(), analytic_spec());
    const std::string c1 = sweep::to_csv(r1);
    const std::string c2 = sweep::to_csv(r2);
    CHECK(c1 == c2);
    CHECK(c1.find("x,r,log10_theorem1,log10_saddle_sum,log10_oracle,oracle_method,"
                  "mc_stderr_rel,rel_err_theorem1,rel_err_saddle_sum\n") != std::string::npos);
    // 17-significant-digit formatting: 0.7 round-trips as 0.69999999999999996
    CHECK(c1.find("# model: {\"mu\":[1,0.69999999999999996,") != std::string::npos);
    CHECK(c1.find("\r") == std::string::npos);
}

TEST_CASE("tilted oracle fills the error columns") {
    sweep::SweepSpec spec;
    spec.x_min = 1e3;
    spec.x_max = 1e5;
    spec.points = 3;
    spec.tiers = {Method::theorem1, Method::mc_importance};
    spec.mc_samples = 100'000;
    spec.seed = 4;
    const auto result = sweep::run_sweep(reference_model(), spec);
    for (const auto& row : result.rows) {
        CHECK(row.oracle_method == "mc_importance");
        REQUIRE(row.rel_err_theorem1);
        CHECK(*row.rel_err_theorem1 < 1.0);
        CHECK(row.mc_stderr_rel);
        CHECK(!row.log10_saddle_sum);
    }
    const std::string json = sweep::to_json(result);
    CHECK(json.find("\"rows\":[{") != std::string::npos);
    CHECK(json.find("\"oracle_method\":\"mc_importance\"") != std::string::npos);
}

TEST_CASE("quadrature oracle is selected inside its envelope") {
    const ProductModel m = validate_model({1.0, 0.5}, {1.0, 1.0});
    sweep::SweepSpec spec;
    spec.x_min = 2.0;
    spec.x_max = 8.0;
    spec.points = 2;
    spec.tiers = {Method::theorem1, Method::quadrature, Method::mc_importance};
    const auto result = sweep::run_sweep(m, spec);
    for (const auto& row : result.rows) {
        CHECK(row.oracle_method == "quadrature");
        CHECK(!row.mc_stderr_rel);
    }
}
