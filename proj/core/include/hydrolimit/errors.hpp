#pragma once

#include <stdexcept>
#include <string>

namespace hydrolimit {

// Bad arguments: non-positive lengths, wrong parity, unknown tags.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature or root finding failed, step underflow, energy drift.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two particles effectively on top of each other inside the range.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Cascade construction could not realise the requested encounter.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collision pattern outside binary exchange / triple with resting middle.
class UnsupportedCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hydrolimit
