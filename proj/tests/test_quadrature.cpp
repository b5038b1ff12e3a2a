#include <doctest.h>

#include <cmath>

#include "prodtail/montecarlo.hpp"
#include "prodtail/normal.hpp"
#include "prodtail/quadrature.hpp"

using namespace prodtail;

TEST_CASE("one factor is the exact survival function") {
    const ProductModel m = validate_model({0.0}, {1.0});
    CHECK(std::exp(oracle::tail_quadrature(m, 0.0).log_p) == 0.5);

    const ProductModel shifted = validate_model({0.5}, {2.0});
    for (double x : {-6.0, -1.0, 0.0, 2.5, 11.0, 40.0}) {
        const double p = std::exp(oracle::tail_quadrature(shifted, x).log_p);
        const double cdf = norm_cdf((x - 0.5) / 2.0);
        CHECK(p + cdf == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("two symmetric factors split the sign evenly") {
    const ProductModel m = validate_model({0.0, 0.0}, {1.0, 1.0});
    CHECK(std::exp(oracle::tail_quadrature(m, 0.0).log_p) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("product of two standard normals at x = 1") {
    const ProductModel m = validate_model({0.0, 0.0}, {1.0, 1.0});
    const TailEstimate est = oracle::tail_quadrature(m, 1.0);
    // frozen from an independent long-double Simpson evaluation of
    // 2 int phi(u) sf(1/u) du; also re-derived here with a coarse oracle
    CHECK(std::exp(est.log_p) == doctest::Approx(0.104496831502326161).epsilon(1e-9));

    double acc = 0.0;
    const int steps = 200000;
    const double w_lo = -30.0, w_hi = std::log(40.0);
    const double h = (w_hi - w_lo) / steps;
    for (int k = 0; k <= steps; ++k) {
        const double u = std::exp(w_lo + h * k);
        const double f = norm_pdf(u) * norm_sf(1.0 / u) * u;
        acc += (k == 0 || k == steps) ? f : (k % 2 ? 4.0 * f : 2.0 * f);
    }
    const double simpson = 2.0 * acc * h / 3.0;
    CHECK(std::exp(est.log_p) == doctest::Approx(simpson).epsilon(1e-8));
}

TEST_CASE("reported accuracy covers tolerance halving") {
    const ProductModel m = validate_model({1.0, 0.5}, {1.0, 1.0});
    const TailEstimate base = oracle::tail_quadrature(m, 5.0);
    REQUIRE(base.rel_accuracy);
    CHECK(*base.rel_accuracy <= 1e-8);
    oracle::QuadratureConfig half;
    half.rel_tol = 0.5e-10;
    const TailEstimate refined = oracle::tail_quadrature(m, 5.0, half);
    CHECK(std::fabs(refined.log_p - base.log_p) <= *base.rel_accuracy);
}

TEST_CASE("quadrature is nonincreasing in the threshold") {
    const ProductModel m = validate_model({1.0, 0.5}, {1.0, 1.0});
    double prev = 1.0;
    for (double x : {-4.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0, 9.0, 14.0}) {
        const double log_p = oracle::tail_quadrature(m, x).log_p;
        CHECK(log_p <= prev + 1e-12);
        prev = log_p;
    }
}

TEST_CASE("deep two-factor tail stays accurate in log space") {
    const ProductModel m = validate_model({1.0, 0.5}, {1.0, 1.0});
    const TailEstimate est = oracle::tail_quadrature(m, 800.0);
    CHECK(est.log_p < -700.0);
    CHECK(!est.p);  // below the linear underflow threshold
    // cross-check against the importance-sampling estimator
    oracle::McConfig cfg;
    cfg.n_samples = 400000;
    cfg.seed = 3;
    cfg.proposal = oracle::McConfig::Proposal::saddle_tilt;
    const TailEstimate tilt = oracle::mc_estimate(m, 800.0, cfg);
    CHECK(std::fabs(est.log_p - tilt.log_p) <= 5.0 * *tilt.stderr_rel);
}

TEST_CASE("three factors against plain Monte Carlo") {
    const ProductModel m = validate_model({1.0, 0.5, 0.2}, {1.0, 1.0, 1.0});
    const TailEstimate quad = oracle::tail_quadrature(m, 3.0);
    oracle::McConfig cfg;
    cfg.n_samples = 2'000'000;
    cfg.seed = 11;
    cfg.shards = 2;
    const TailEstimate mc = oracle::mc_estimate(m, 3.0, cfg);
    CHECK(std::fabs(std::exp(quad.log_p) - *mc.p) <= 3.0 * *mc.stderr_linear);
}

TEST_CASE("four factors against plain Monte Carlo") {
    const ProductModel m = validate_model({1.0, 0.7, -0.4, 1.3}, {1.0, 1.2, 1.5, 0.9});
    const TailEstimate quad = oracle::tail_quadrature(m, 5.0);
    oracle::McConfig cfg;
    cfg.n_samples = 2'000'000;
    cfg.seed = 12;
    cfg.shards = 2;
    const TailEstimate mc = oracle::mc_estimate(m, 5.0, cfg);
    CHECK(std::fabs(std::exp(quad.log_p) - *mc.p) <= 3.0 * *mc.stderr_linear);
}

TEST_CASE("recursion guard above four factors") {
    const ProductModel m = validate_model({0, 0, 0, 0, 0}, {1, 1, 1, 1, 1});
    try {
        oracle::tail_quadrature(m, 1.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::n_too_large_for_quadrature);
    }
}

TEST_CASE("config validation") {
    const ProductModel m = validate_model({0.0}, {1.0});
    oracle::QuadratureConfig bad;
    bad.truncation_radius = 4.0;
    CHECK_THROWS_AS(oracle::tail_quadrature(m, 1.0, bad), Error);
}
