#pragma once

#include <stdexcept>
#include <string>

namespace spintomo {

/// Bad domain values: broken invariants, malformed files, out-of-range parameters.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine ran out of budget or could not reach its target accuracy.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A measurement direction is not reachable with the configured analyzer.
class NoSolutionError : public ConvergenceError {
public:
    explicit NoSolutionError(const std::string& what) : ConvergenceError(what) {}
};

/// Filesystem-level failure (missing file, unwritable path).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spintomo
