#pragma once

#include <stdexcept>
#include <string>

namespace mcprox {

/// Bad configuration or command-line usage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The calibration program has no feasible correction.
class InfeasibleCalibration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mcprox
