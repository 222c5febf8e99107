#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace tempocom {

using NodeId = std::uint32_t;
using Timestamp = std::int32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Bad input to an operation (invalid interval, empty node set, out-of-range parameter).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed temporal edge-list input. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An iterative solver did not converge within its cap.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t iterations)
        : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

/// Exhaustive routine refused an instance above its size guard.
class SizeLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tempocom
