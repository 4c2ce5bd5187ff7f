#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace biphoton {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter failed validation. `field()` names the offending parameter.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The quadrature grid does not contain the aperture support.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// The delta kernel has no pointwise value.
class UnsupportedEvaluation : public Error {
public:
    using Error::Error;
};

class WindowTooSmall : public Error {
public:
    using Error::Error;
};

class InsufficientPeaks : public Error {
public:
    using Error::Error;
};

/// Grids of two patterns or configs do not line up.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Data cannot constrain the requested free parameters.
class DegenerateData : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Non-fatal condition attached to a computed result.
struct Diagnostic {
    std::string code;
    std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

} // namespace biphoton
