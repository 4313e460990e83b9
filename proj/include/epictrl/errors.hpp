#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epictrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent vector lengths (dose count mismatch between state and parameters).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter combination that makes a closed-form expression undefined.
class DegenerateParameterError : public Error {
 public:
  using Error::Error;
};

/// A compartment went negative beyond the roundoff tolerance; usually a step that is too large.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// An impulse time that is not a grid node, out of order, or outside the horizon.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// Trajectory, controls and grid do not describe the same time samples.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Bad horizon, step or search interval.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Control weights for which the pointwise control formulas divide by zero.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// A NaN reached a place where it would otherwise be silently clamped.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Brute-force search configuration enumerates too many candidates.
class ExplosionGuardError : public Error {
 public:
  using Error::Error;
};

/// A perturbed control leaves its admissible box.
class BoxViolationError : public Error {
 public:
  using Error::Error;
};

class UnknownPresetError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document. The message carries line and field context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A configuration that parsed but violates one or more invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) {
      out += "\n  - ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace epictrl
