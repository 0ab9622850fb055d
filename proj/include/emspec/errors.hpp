// Error taxonomy for the toolkit. InvalidInputError covers malformed
// arguments, parameter values that violate type invariants, and schema
// violations in configuration-like files. DataError covers structurally
// valid data that an operation cannot work with (grid mismatches, missing
// resonance dips, unbracketed crossings, ...). Fit non-convergence is not
// an exception; it travels in result flags.
#pragma once

#include <stdexcept>
#include <string>

namespace emspec {

class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emspec
