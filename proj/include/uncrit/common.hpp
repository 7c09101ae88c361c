#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uncrit {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent options, dimensions, or requests (CLI exit code 2).
struct config_error : error {
    using error::error;
};

/// Malformed or invalid input data (CLI exit code 3).
struct parse_error : error {
    using error::error;
};

/// Numerical failure: solver did not converge, rank collapse, ... (CLI exit code 4).
struct numeric_error : error {
    using error::error;
};

inline constexpr int exit_code_config = 2;
inline constexpr int exit_code_parse = 3;
inline constexpr int exit_code_numeric = 4;

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

} // namespace uncrit
