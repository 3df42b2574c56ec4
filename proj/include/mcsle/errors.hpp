#pragma once

#include <stdexcept>
#include <string>

namespace mcsle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar parameter (kappa, n, step count, resolution, ...) is out of range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A boundary configuration violates strict ordering or has the wrong arity.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Input data (driving samples, curves, sample sets) is malformed.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Finite-difference step is too large for the point separation.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcsle
