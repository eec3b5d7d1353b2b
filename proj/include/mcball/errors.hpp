#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcball {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed user input: bad dimensions, non-finite data, unparsable files.
struct InputError : Error {
  using Error::Error;
};

/// A triangular solve hit a pivot below the rank tolerance.
struct SingularSystemError : Error {
  SingularSystemError(const std::string& what, std::size_t pivot)
      : Error(what), pivot_index(pivot) {}
  std::size_t pivot_index;
};

/// The working set lost full column rank where the algorithm requires it.
struct DegenerateSupportError : Error {
  using Error::Error;
};

/// A condition the algorithm guarantees in exact arithmetic failed; this
/// signals numerical breakdown rather than bad input.
struct InvariantViolationError : Error {
  using Error::Error;
};

/// A computation became ill-posed (e.g. every facet intersection undefined).
struct NumericalDegeneracyError : Error {
  using Error::Error;
};

}  // namespace mcball
