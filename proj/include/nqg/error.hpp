#pragma once

#include <stdexcept>
#include <string>

namespace nqg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an input value does not hold. Detectable before any
/// compute runs; the CLI maps it to exit code 1.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields live on incompatible lattices. Never resampled silently.
class GridMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Something went wrong during the numerics (corruption, non-convergence,
/// postcondition failure). The CLI maps it to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Realigned pre-interaction branches do not coincide: the gauge
/// prescription does not describe a common background for the pair.
class PrescriptionMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nqg
