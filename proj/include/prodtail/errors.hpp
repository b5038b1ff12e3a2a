#pragma once

#include <stdexcept>
#include <string>

namespace prodtail {

// Machine-readable failure categories. Tags are stable strings used by the
// CLI to report errors and pick exit codes; tests match on the code enum.
enum class ErrorCode {
    // model validation
    empty_model,
    non_positive_sigma,
    length_mismatch,
    non_finite_parameter,
    model_file_invalid,
    // sign patterns
    n_too_large_for_enumeration,
    // saddle solving
    no_saddle_in_region,
    tolerance_not_reached,
    degenerate_coordinate,
    hessian_not_pd,
    // asymptotics
    all_means_zero,
    bound_not_valid,
    n_too_small,
    // oracles
    n_too_large_for_quadrature,
    accuracy_not_reached,
    saddle_unavailable,
    degenerate_variance,
    // cli
    usage,
    internal,
};

inline const char* error_tag(ErrorCode code) {
    switch (code) {
        case ErrorCode::empty_model: return "empty-model";
        case ErrorCode::non_positive_sigma: return "non-positive-sigma";
        case ErrorCode::length_mismatch: return "length-mismatch";
        case ErrorCode::non_finite_parameter: return "non-finite-parameter";
        case ErrorCode::model_file_invalid: return "model-file-invalid";
        case ErrorCode::n_too_large_for_enumeration: return "n-too-large-for-enumeration";
        case ErrorCode::no_saddle_in_region: return "no-saddle-in-region";
        case ErrorCode::tolerance_not_reached: return "tolerance-not-reached";
        case ErrorCode::degenerate_coordinate: return "degenerate-coordinate";
        case ErrorCode::hessian_not_pd: return "hessian-not-pd";
        case ErrorCode::all_means_zero: return "all-means-zero";
        case ErrorCode::bound_not_valid: return "bound-not-valid";
        case ErrorCode::n_too_small: return "n-too-small";
        case ErrorCode::n_too_large_for_quadrature: return "n-too-large-for-quadrature";
        case ErrorCode::accuracy_not_reached: return "accuracy-not-reached";
        case ErrorCode::saddle_unavailable: return "saddle-unavailable";
        case ErrorCode::degenerate_variance: return "degenerate-variance";
        case ErrorCode::usage: return "usage";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

// Exit-code classes used by the CLI: 2 usage, 3 input, 4 numerical regime,
// 5 internal.
inline int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::usage:
            return 2;
        case ErrorCode::empty_model:
        case ErrorCode::non_positive_sigma:
        case ErrorCode::length_mismatch:
        case ErrorCode::non_finite_parameter:
        case ErrorCode::model_file_invalid:
            return 3;
        case ErrorCode::internal:
            return 5;
        default:
            return 4;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_tag(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    const char* tag() const noexcept { return error_tag(code_); }

private:
    ErrorCode code_;
};

}  // namespace prodtail
