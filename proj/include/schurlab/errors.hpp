#pragma once

#include <stdexcept>
#include <string>

namespace schurlab {

// Bad arguments or malformed data supplied by the caller.
class InvalidInputError : public std::runtime_error {
public:
  explicit InvalidInputError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative kernel failed to converge, or a computed result violates its
// contract.  Carries the offending residual when one is known.
class NumericFailureError : public std::runtime_error {
public:
  explicit NumericFailureError(const std::string& msg, double residual = 0.0)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

// Raised by the backward pairing step when a perturbed eigenvector has no
// usable component in the matched kernel of the reference matrix.
class PairingFailureError : public std::runtime_error {
public:
  explicit PairingFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace schurlab
