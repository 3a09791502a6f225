#pragma once

#include <stdexcept>
#include <string>

namespace fracflow {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// geometry
class DimensionError : public Error { using Error::Error; };
class ResolutionError : public Error { using Error::Error; };
class GeometryMismatch : public Error { using Error::Error; };

// fraclap
class ModeOutOfRange : public Error { using Error::Error; };
class DecayError : public Error { using Error::Error; };
class SingularMeshError : public Error { using Error::Error; };
class CalibrationError : public Error { using Error::Error; };

// functionals / flow
class ZeroFieldError : public Error { using Error::Error; };
class StepFailure : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };

/// Raised when a field that must be strictly positive is not.
/// Carries the offending minimum and the grid node where it occurred.
class PositivityError : public Error {
public:
    PositivityError(const std::string& what, double min_value, std::size_t node)
        : Error(what), min_value_(min_value), node_(node) {}

    double min_value() const noexcept { return min_value_; }
    std::size_t node() const noexcept { return node_; }

private:
    double min_value_;
    std::size_t node_;
};

class BlowupError : public Error { using Error::Error; };

// bubbles
class PoleError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };

// stability
class IndexError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class InsufficientDataError : public Error { using Error::Error; };

/// Configuration problem; key() names the offending config key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config key '" + key + "': " + what), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace fracflow
