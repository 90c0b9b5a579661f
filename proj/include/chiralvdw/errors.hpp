#pragma once

#include <stdexcept>
#include <string>

namespace chiralvdw {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration (maps to CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergence, singular geometry, non-finite values
// (maps to CLI exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// File could not be read or written (maps to CLI exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chiralvdw
