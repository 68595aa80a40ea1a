#pragma once

#include <stdexcept>
#include <string>

namespace grovercav {

// Bad argument: index out of range, dimension mismatch, malformed input.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request is well-formed but has no solution (e.g. too few Grover steps).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or root-finding failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Heralding on a state with (numerically) zero trace.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace grovercav
