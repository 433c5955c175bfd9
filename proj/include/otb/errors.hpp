#pragma once

#include <stdexcept>
#include <string>

namespace otb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: bad arguments, an uncovered regime, malformed measures.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of a formula.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// A required argument is missing or inconsistent with the others.
class ArgumentError : public InputError {
 public:
  using InputError::InputError;
};

/// The covering-number bound needs d >= 8.
class UnsupportedDimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// No bound is available for the requested (d, p, q) combination or norm.
class NoBoundError : public InputError {
 public:
  using InputError::InputError;
};

/// A threshold c <= 1 can never be met since theta > 1.
class UnreachableTargetError : public InputError {
 public:
  using InputError::InputError;
};

/// Problem exceeds the solver's size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Weights of a measure do not sum to one.
class NormalizationError : public InputError {
 public:
  using InputError::InputError;
};

/// A point lies outside the unit ball a partition is built on.
class ContainmentError : public InputError {
 public:
  using InputError::InputError;
};

/// Measure atoms are not covered by the partition tree's point set.
class SupportMismatchError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace otb
