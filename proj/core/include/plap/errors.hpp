#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar argument lies outside the domain where a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (grid size, solver parameters, CLI keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A ball or profile radius is below what the mesh can resolve.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A requested point is not a node of the grid.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Input field is degenerate for the requested transform (zero norm, flat).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A transform would need data from outside the discretized domain.
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

/// The base point is a critical point where the transform is undefined.
class CriticalPointError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during a numerical computation.
class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

}  // namespace plap
