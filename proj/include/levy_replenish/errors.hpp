#pragma once

#include <stdexcept>
#include <string>

namespace levy_replenish {

/// Argument outside the domain where a formula is defined (pole, divergent transform).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not reach its tolerance (root bracketing, quadrature,
/// near-multiple roots).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace levy_replenish
