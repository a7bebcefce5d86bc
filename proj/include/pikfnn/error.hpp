#pragma once

#include <stdexcept>
#include <string>

namespace pikfnn {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input-validation failures (bad arguments, malformed files, bad configs).
/// The CLI maps this branch to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Failures that arise while computing (singular matrices, divergence).
/// The CLI maps this branch to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnsupportedKernelError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedSourceError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, int line)
        : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ConfigurationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, long iteration)
        : NumericalError(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}
    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

class ConditioningError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// CLI exit status for an exception: 2 for validation, 3 for numerical.
inline int exit_code(const std::exception& e) {
    return dynamic_cast<const ValidationError*>(&e) != nullptr ? 2 : 3;
}

} // namespace pikfnn
