#include <doctest.h>

#include <cmath>
#include <limits>

#include "prodtail/model.hpp"
#include "prodtail/model_io.hpp"

using namespace prodtail;

namespace {

ProductModel paper_model() {
    return validate_model({1.0, 0.7, -0.4, 1.3}, {1.0, 1.2, 1.5, 0.9});
}

}  // namespace

TEST_CASE("validate_model accepts the reference and minimal models") {
    CHECK(paper_model().n() == 4);
    CHECK(validate_model({0.0}, {1.0}).n() == 1);
}

TEST_CASE("validate_model rejects malformed parameters") {
    CHECK_THROWS_AS(validate_model({1.0}, {0.0}), Error);
    try {
        validate_model({1.0}, {0.0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_positive_sigma);
    }
    try {
        validate_model({}, {});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::empty_model);
    }
    try {
        validate_model({1.0, 2.0}, {1.0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::length_mismatch);
    }
    try {
        validate_model({std::numeric_limits<double>::quiet_NaN()}, {1.0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_finite_parameter);
    }
    try {
        validate_model({1.0}, {std::numeric_limits<double>::infinity()});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_finite_parameter);
    }
}

TEST_CASE("standardized ratios of the reference model") {
    const auto r = standardized_ratios(paper_model());
    CHECK(r.a[0] == 1.0);
    CHECK(r.a[1] == 0.7 / 1.2);
    CHECK(r.a[2] == -0.4 / 1.5);
    CHECK(r.a[3] == 1.3 / 0.9);
    CHECK(r.k == 0);
}

TEST_CASE("zero set uses exact equality on the declared means") {
    const auto r = standardized_ratios(validate_model({0.0, 0.0, 0.0}, {2.0, 3.0, 4.0}));
    CHECK(r.k == 3);
    CHECK(r.a == std::vector<double>{0.0, 0.0, 0.0});
    const auto one = standardized_ratios(validate_model({5.0}, {5.0}));
    CHECK(one.a[0] == 1.0);
    CHECK(one.k == 0);
    // tiny but nonzero means stay out of the zero set
    const auto tiny = standardized_ratios(validate_model({1e-300}, {1.0}));
    CHECK(tiny.k == 0);
}

TEST_CASE("ratios are scale invariant up to one division rounding") {
    const ProductModel base = paper_model();
    for (double c : {0.5, 3.0, 1e-3, 1e7}) {
        ProductModel scaled = base;
        for (auto& m : scaled.mu) m *= c;
        for (auto& s : scaled.sigma) s *= c;
        const auto r0 = standardized_ratios(base);
        const auto r1 = standardized_ratios(scaled);
        CHECK(r1.k == r0.k);
        for (std::size_t i = 0; i < base.n(); ++i) {
            CHECK(r1.a[i] == doctest::Approx(r0.a[i]).epsilon(4e-16));
        }
    }
}

TEST_CASE("model json round trip is the identity") {
    const ProductModel base = validate_model({1.0, 0.7, -0.4, 1.3, 0.0, 1e-17, -17.25},
                                             {1.0, 1.2, 1.5, 0.9, 3.25, 0.125, 1e8});
    const ProductModel back = model_from_json_text(model_to_json_text(base));
    CHECK(back.mu == base.mu);
    CHECK(back.sigma == base.sigma);
}

TEST_CASE("model parser enforces the exact schema") {
    CHECK(model_from_json_text(R"({"mu":[1.0,0.7,-0.4,1.3],"sigma":[1.0,1.2,1.5,0.9]})").n() == 4);
    for (const char* bad : {
             "not json at all",
             R"({"mu":[1.0]})",
             R"({"sigma":[1.0]})",
             R"({"mu":1.0,"sigma":[1.0]})",
             R"({"mu":["a"],"sigma":[1.0]})",
         }) {
        try {
            model_from_json_text(bad);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::model_file_invalid);
        }
    }
    // structurally valid json, invalid model
    try {
        model_from_json_text(R"({"mu":[1.0,2.0],"sigma":[1.0]})");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::length_mismatch);
    }
    try {
        model_from_json_text(R"({"mu":[1.0],"sigma":[-1.0]})");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_positive_sigma);
    }
}
