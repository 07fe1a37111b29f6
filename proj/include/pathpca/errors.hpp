#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathpca {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Graph structure does not satisfy the DAG invariants (cycle, no S-T path, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Operands disagree on the data dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration refused because the path count exceeds the cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Numerical precondition failed or a numerical routine did not converge.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Invalid argument or configuration value supplied by the caller.
class UsageError : public Error {
public:
    using Error::Error;
};

// A result failed a post-condition check (should never happen).
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace pathpca
