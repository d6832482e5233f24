#pragma once

#include <stdexcept>
#include <string>

namespace gradecho {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (z outside [0, L], T < 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, scenario, or sweep specification.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite or runaway values during integration.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long step)
        : Error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

/// Requested work exceeds the configured resource budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the given input (zero energy, no echo, ambiguous peak).
class MetricError : public Error {
public:
    using Error::Error;
};

} // namespace gradecho
