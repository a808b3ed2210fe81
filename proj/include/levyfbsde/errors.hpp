#pragma once

#include <stdexcept>
#include <string>

namespace levyfbsde {

// Bad user-facing configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during a simulation or a solve (CLI exit code 3).
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature could not reach the requested accuracy.
class IntegrationError : public NumericError {
  public:
    explicit IntegrationError(const std::string& what) : NumericError(what) {}
};

}  // namespace levyfbsde
