#pragma once

#include <stdexcept>
#include <string>

namespace winquant {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid window, quantile set, generator or policy configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (CSV rows and the like).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A result was requested from a state holding no elements.
class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

/// Deaccumulation of a value that was never accumulated.
class StateCorruptionError : public Error {
 public:
  using Error::Error;
};

/// Level-2 result requested before the sub-window ring is full.
class WarmupError : public Error {
 public:
  using Error::Error;
};

/// A few-k merge was requested with a zero budget.
class NotEnabledError : public Error {
 public:
  using Error::Error;
};

/// The error bound cannot be computed (non-positive or unknown density).
class UndefinedBoundError : public Error {
 public:
  using Error::Error;
};

/// Not enough events to produce a metric (e.g. throughput on < 2 windows).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace winquant
