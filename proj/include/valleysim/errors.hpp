#pragma once

#include <stdexcept>
#include <string>

namespace valleysim {

enum class ErrorCode {
    invalid_parameter,
    out_of_range,
    resource_limit,
    insufficient_path,
    insufficient_data,
    overflow_domain,
    series_domain_exceeded,
    quadrature_nonconvergence,
    path_exhausted,
    step_budget_exceeded,
    coverage_gap,
    format_violation,
    usage_error,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::invalid_parameter: return "invalid-parameter";
        case ErrorCode::out_of_range: return "out-of-range";
        case ErrorCode::resource_limit: return "resource-limit";
        case ErrorCode::insufficient_path: return "insufficient-path";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::overflow_domain: return "overflow-domain";
        case ErrorCode::series_domain_exceeded: return "series-domain-exceeded";
        case ErrorCode::quadrature_nonconvergence: return "quadrature-nonconvergence";
        case ErrorCode::path_exhausted: return "path-exhausted";
        case ErrorCode::step_budget_exceeded: return "step-budget-exceeded";
        case ErrorCode::coverage_gap: return "coverage-gap";
        case ErrorCode::format_violation: return "format-violation";
        case ErrorCode::usage_error: return "usage-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace valleysim
