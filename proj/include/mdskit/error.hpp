#pragma once

#include <stdexcept>
#include <string>

namespace mdskit {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (edge lists, JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A loaded or constructed object violates one of its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Matrix or vector shapes do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdskit
