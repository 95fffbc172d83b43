#pragma once

#include <stdexcept>
#include <string>

namespace arb {

// Bad input data: unparseable files, missing days, empty series.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures: diverging training, NaN propagation, broken preconditions
// on numeric state (e.g. non-monotone value curves fed to the recursion).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration: storage parameters out of range, inconsistent
// training settings, malformed schema.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arb
