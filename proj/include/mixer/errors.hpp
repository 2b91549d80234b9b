#pragma once

#include <stdexcept>
#include <string>

namespace mixer {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// A bracketed root was requested where none exists (or the bracket has no
// sign change).
struct NoRootError : std::runtime_error {
  explicit NoRootError(const std::string& msg) : std::runtime_error(msg) {}
};

// Vector argument is not a probability vector within tolerance.
struct SimplexError : std::runtime_error {
  explicit SimplexError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative search failed to meet its convergence contract.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact enumeration requested beyond the supported size gate.
struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sampler produced a state outside the reference distribution's support.
struct SupportError : std::runtime_error {
  explicit SupportError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument has the wrong kind (e.g. non-integer q where an integer is
// required).
struct TypeError : std::runtime_error {
  explicit TypeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mixer
