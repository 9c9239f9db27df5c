#pragma once

#include <stdexcept>
#include <string>

namespace kdv5 {

/// Argument outside an operation's domain (length mismatch, bad exponent, ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A grid is too coarse to represent the requested data.
class InvalidResolution : public std::invalid_argument {
 public:
  explicit InvalidResolution(const std::string& what) : std::invalid_argument(what) {}
};

/// A quadrature did not reach its tolerance within the refinement budget.
class AccuracyFailure : public std::runtime_error {
 public:
  explicit AccuracyFailure(const std::string& what) : std::runtime_error(what) {}
};

/// The time stepper detected runaway growth and stopped.
class AbortedRun : public std::runtime_error {
 public:
  explicit AbortedRun(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kdv5
