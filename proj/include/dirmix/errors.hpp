#pragma once

#include <stdexcept>

namespace dirmix {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent arguments (bad masks, mismatched dimensions, ...).
struct DomainError : Error {
  using Error::Error;
};

// A dense 2^n coefficient table would exceed the configured mask cap.
struct CapacityError : Error {
  using Error::Error;
};

// An enumeration oracle refuses because the instance exceeds its budget.
struct BudgetError : Error {
  using Error::Error;
};

// The observation sequence has probability zero under the model.
struct DegenerateEvidenceError : Error {
  using Error::Error;
};

// The tree decomposition does not fit the instance at the requested eps.
struct DecompositionMismatchError : Error {
  using Error::Error;
};

}  // namespace dirmix
