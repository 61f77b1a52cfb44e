#pragma once

#include <stdexcept>
#include <string>

namespace dphase {

/// Base for every error raised by the library. The CLI maps the concrete
/// subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field, weight or mesh sizes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing, quadrature refinement or another numerical procedure
/// failed to produce a trustworthy value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Mesh geometry does not support the requested operation (asymmetric
/// reflection, non-nested family, measure mismatch).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the caller was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The closed-form norm is undefined because the q-phase vanishes on the
/// support of u; the caller must use the L^p norm and record that it did.
class FallbackRequired : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration text, unknown keys, bad descriptors.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dphase
