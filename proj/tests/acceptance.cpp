#include <doctest.h>

#include <chrono>
#include <cstdio>

#include "prodtail/selfcheck.hpp"

// Acceptance suite: one test case per criterion, one printed pass/fail line
// each, with the measured quantities inline.

namespace {

using prodtail::selfcheck::CheckResult;

void report(int index, const CheckResult& result, double seconds) {
    std::printf("[%s] criterion %2d: %s (%.2fs) — %s\n", result.pass ? "PASS" : "FAIL", index,
                result.name.c_str(), seconds, result.detail.c_str());
    std::fflush(stdout);
}

template <class F>
CheckResult timed(int index, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result = fn();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(index, result, seconds);
    return result;
}

}  // namespace

using namespace prodtail::selfcheck;

TEST_CASE("criterion 1: sign-optimizer oracle equivalence") {
    const CheckResult r = timed(1, criterion_sign_oracle_equivalence);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 2: reference model regression") {
    const CheckResult r = timed(2, criterion_reference_model_regression);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 3: zero-mean saddle exactness") {
    const CheckResult r = timed(3, criterion_zero_mean_exactness);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 4: n=1 reduction to the normal tail") {
    const CheckResult r = timed(4, criterion_mills_reduction);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 5: exponent expansion convergence") {
    const CheckResult r = timed(5, criterion_expansion_convergence);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 6: prefactor limits") {
    const CheckResult r = timed(6, criterion_prefactor_limits);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 7: tier agreement") {
    const CheckResult r = timed(7, criterion_tier_agreement);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 8: oracle cross-check at n=2") {
    const CheckResult r = timed(8, criterion_oracle_cross_check);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 9: figure reproduction sweep") {
    const CheckResult r = timed(9, criterion_figure_reproduction);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 10: invariance suite") {
    const CheckResult r = timed(10, criterion_invariance_suite);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("criterion 11: unbalanced-region negligibility") {
    const CheckResult r = timed(11, criterion_negligibility);
    CHECK_MESSAGE(r.pass, r.detail);
}
