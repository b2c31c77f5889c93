#pragma once

#include <stdexcept>
#include <string>

namespace cip {

/// Bad configuration or malformed input (CLI exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure at run time: instability, lost positivity,
/// solver breakdown (CLI exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cip
