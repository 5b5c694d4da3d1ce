#pragma once

#include <stdexcept>
#include <string>

namespace warstats {

// Malformed input files: bad header, unreadable rows, empty sources.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A year (or lag, or index) outside the domain a lookup supports.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Non-finite values, degenerate inputs, or a solver that cannot proceed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace warstats
