#pragma once

#include <stdexcept>
#include <string>

namespace procnash {

// Caller broke a documented precondition (dimension mismatch, bad index map,
// constant matrix passed to scoring, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The LP or enumeration path failed to produce a certified equilibrium.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A padded game failed its oracle re-verification.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace procnash
