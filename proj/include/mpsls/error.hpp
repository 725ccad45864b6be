#pragma once

#include <stdexcept>
#include <string>

namespace mpsls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand extents are incompatible (e.g. inner dimensions of a product).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input exceeds what an enumeration oracle is willing to handle.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// No injection avoids the bottom entries (permanent is -inf).
class StructuralRankError : public Error {
 public:
  using Error::Error;
};

/// Internal certificate check failed (dual feasibility, reconstruction).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpsls
