#pragma once

#include <stdexcept>
#include <string>

namespace c2f {

// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Hard numeric failure: non-finite values, unusable matrices (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A non-empty subnetwork has fewer active APs than users, so zero-forcing is
// impossible. Recoverable: evaluation records it as an infeasibility flag.
class InfeasibleZfError : public std::runtime_error {
public:
    explicit InfeasibleZfError(const std::string& what) : std::runtime_error(what) {}
};

// The ridged Gram matrix is numerically non-invertible.
class SingularChannelError : public NumericError {
public:
    explicit SingularChannelError(const std::string& what) : NumericError(what) {}
};

}  // namespace c2f
