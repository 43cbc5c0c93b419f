#pragma once

#include <iostream>
#include <stdexcept>
#include <string>

namespace aesn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-facing configuration (flags, config files, search spaces). Exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or insufficient input data (CSV, panels, API responses). Exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (non-convergence, singular systems, degenerate draws). Exit code 4.
class NumericError : public Error {
public:
    using Error::Error;
};

inline void log_warning(const std::string& msg) {
    std::cerr << "[aesn] warning: " << msg << "\n";
}

} // namespace aesn
