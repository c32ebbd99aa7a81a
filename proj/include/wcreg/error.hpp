#pragma once

#include <stdexcept>
#include <string>

namespace wcreg {

/// A caller violated an operation precondition (bad exponent, off-lattice step, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two grid-sampled objects do not share the same grid.
class GridMismatchError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// No feasible point could be located (empty or unreachable feasible set).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wcreg
