#pragma once

#include <stdexcept>
#include <string>

namespace hsflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: invalid JSON config, unknown keys, malformed points.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (dimension, singular point, t = 1 ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature did not reach its tolerance. Carries the best value found.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double partial_value, double partial_error)
        : Error(what), partial_value_(partial_value), partial_error_(partial_error) {}
    double partial_value() const { return partial_value_; }
    double partial_error() const { return partial_error_; }

private:
    double partial_value_;
    double partial_error_;
};

}  // namespace hsflow
