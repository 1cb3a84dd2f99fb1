#pragma once

#include <stdexcept>
#include <string>

namespace locc {

// Input violates a type invariant (normalization, ordering, stochasticity).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requires a specific local dimension (e.g. two qubits).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Scalar argument outside its admissible interval.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A constraint row too close to zero to be trusted by the LP oracle.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A generator precondition does not hold (e.g. no profile drops below 1).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A certificate could not be produced; never reported as success.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace locc
