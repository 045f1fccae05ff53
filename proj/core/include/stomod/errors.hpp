#pragma once

#include <stdexcept>
#include <string>

namespace stomod {

// Root of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid inputs: parameters, configurations, grids. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A computation that cannot produce a result for valid-looking inputs. CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class BelowThresholdError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsaturatedRegimeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IntegrationConfigError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SingularSystemError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Raised when a time trace does not cover a whole number of modulation periods.
class WindowingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidSeedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A root-find target (e.g. a modulation index) outside the reachable range.
class UnreachableTargetError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace stomod
