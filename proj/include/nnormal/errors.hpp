#pragma once

#include <stdexcept>
#include <string>

namespace nnormal {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text: rationals, scalars, model files.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value violates a structural invariant (unknown cell, lower-triangular
/// entry, non-total step function, ...).
class StructureError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotIdempotent : public Error {
 public:
  using Error::Error;
};

class NotInCommutant : public Error {
 public:
  using Error::Error;
};

/// An internal identity failed to verify. Always a bug.
class InvariantBreach : public Error {
 public:
  using Error::Error;
};

}  // namespace nnormal
