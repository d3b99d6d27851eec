#pragma once

#include <stdexcept>

namespace pfa {

// Bad inputs: files, configuration, mismatched dimensions, invalid trees.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime numerical faults: failed factorizations, non-finite estimates.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pfa
