#pragma once

#include <stdexcept>
#include <string>

namespace asrnlab {

/// Action index outside the environment's arm range.
class InvalidActionError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Discount factor for which the optimal-value series diverges.
class InvalidDiscountError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation called in the wrong noiser phase (e.g. observing after
/// calibration was finalized).
class PhaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Calibration cannot produce a valid noise table (too few samples, ...).
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query outside the recorded range (missing episode, empty log).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace asrnlab
