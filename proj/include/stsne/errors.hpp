#pragma once

#include <stdexcept>
#include <string>

namespace stsne {

/// Invalid user-supplied configuration (bad sizes, negative rates, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Inputs that are structurally valid but cannot be processed
/// (mixed dimensionality, empty batch where data is required, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric contraction applied where it is not defined
/// (ring cut on a non-outermost ring, cut on a degenerate polygon, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Operation invoked in the wrong lifecycle state
/// (partial embedding before any fit, ...).
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// Optimization produced non-finite values; message names the iteration.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stsne
