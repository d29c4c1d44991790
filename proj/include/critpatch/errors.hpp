#pragma once

#include <stdexcept>
#include <string>

namespace critpatch {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad parameters, negative densities, malformed domains.
/// The CLI maps this family to exit status 2.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the requested domain.
class ResolutionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Valid input that the requested method does not handle (e.g. closed-form
/// eigenvalue of a ball with nonzero drift).
class UnsupportedError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// A numerical procedure failed. The CLI maps this family to exit status 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularIntegrandError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace critpatch
