#pragma once

#include <stdexcept>
#include <string>

namespace raysel {

// Error taxonomy mirrored by the CLI exit codes: InputError -> 2,
// InfeasibleCoverageError -> 3, IoError -> 4, everything else -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Thrown when the requested K is below the minimal coverage cardinality.
class KTooSmallError : public InputError {
 public:
  KTooSmallError(int k, int k_min)
      : InputError("k = " + std::to_string(k) +
                   " is below the minimal coverage size k_min = " +
                   std::to_string(k_min)),
        k(k),
        k_min(k_min) {}
  int k;
  int k_min;
};

// A grid point that no camera sees; carries the offending point index.
class InfeasibleCoverageError : public Error {
 public:
  explicit InfeasibleCoverageError(int point_index)
      : Error("grid point " + std::to_string(point_index) +
              " is not visible from any camera"),
        point_index(point_index) {}
  int point_index;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace raysel
