#pragma once

#include <stdexcept>
#include <string>

namespace isotri {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: invalid curve data, indices out of range, wrong regime.
/// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver its result.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public InputError {
 public:
  using InputError::InputError;
};

/// Operation called outside its sign-of-n / gcd regime.
class InvalidRegime : public InputError {
 public:
  using InputError::InputError;
};

/// A chain does not describe a closed cycle admissible for the construction.
class RegimeViolation : public InputError {
 public:
  using InputError::InputError;
};

class RadiusTooLarge : public InputError {
 public:
  using InputError::InputError;
};

class RadiusTooSmall : public InputError {
 public:
  using InputError::InputError;
};

class BranchPointHit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Root matching during continuation stayed ambiguous at the minimum step.
class StepFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoleTooClose : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureNoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ChainTooCloseToFiber : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GeometryFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace isotri
