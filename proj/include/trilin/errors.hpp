#pragma once

#include <stdexcept>
#include <string>

namespace trilin {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent user input (bad config values, mismatched bases,
// malformed files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A normal mode frequency came out imaginary: the trap settings put the
// crystal past a structural instability. The message names the mode.
class ComplexFrequency : public Error {
 public:
  using Error::Error;
};

// A requested basis would exceed the configured dimension cap.
class DimensionCap : public Error {
 public:
  using Error::Error;
};

// A requested occupation lies outside the truncation.
class OutOfTruncation : public Error {
 public:
  using Error::Error;
};

// An initial state would lose more probability to the cutoff than allowed.
class TruncationLeak : public Error {
 public:
  using Error::Error;
};

// An iterative routine failed to reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// A linear inversion is too poorly conditioned to trust.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

}  // namespace trilin
