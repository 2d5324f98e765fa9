#pragma once

#include <stdexcept>
#include <string>

namespace clifford {

// Base of everything the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched or out-of-range algebra dimension.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A value carries coefficients outside its declared grade(s).
class GradeError : public Error {
 public:
  using Error::Error;
};

// Empty domain, stencil set too small, or fields on different lattices.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Kernel evaluated at the origin.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Kernel parameters outside the supported (n, alpha) set.
class UnsupportedParameterError : public Error {
 public:
  using Error::Error;
};

// Cauchy operator evaluated on a boundary face.
class OnBoundaryError : public Error {
 public:
  using Error::Error;
};

// Invalid (m, r, p, q) system specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Malformed scene file; the message starts with "file:line:".
class SceneError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

}  // namespace clifford
