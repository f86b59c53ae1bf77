#pragma once

#include <stdexcept>
#include <string>

namespace coxreg {

// Invalid configuration or parameters (bad grid sizes, infeasible constraint
// bands, unknown presets). CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (arrivals outside the window, covariate
// mismatches, unparseable rows). CLI maps this to exit code 3.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at run time (degenerate smoothing design, ill-conditioned
// covariance, projection not converging). CLI maps this to exit code 4.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coxreg
