#pragma once

#include <stdexcept>

namespace sbfe {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed textual input: formula files, JSON configs, graph files, bitstrings.
struct ParseError : Error {
  using Error::Error;
};

// Structurally invalid arguments: indices out of range, incomplete assignments
// where full ones are required, infeasible cover instances, constant formulas
// where a proper instance is needed.
struct InvalidInputError : Error {
  using Error::Error;
};

// The operation requires a monotone formula but the input carries negations.
struct NotMonotoneError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

// Instance exceeds an enumeration or state-space guard.
struct SizeLimitError : Error {
  using Error::Error;
};

// The requested variant does not apply to the given problem, e.g. the
// unit-cost/uniform-distribution solver on a weighted instance.
struct IncompatibleError : Error {
  using Error::Error;
};

}  // namespace sbfe
