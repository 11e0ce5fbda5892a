#pragma once

#include <stdexcept>
#include <string>

namespace qdim {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad words, out-of-range symbols, invalid system or
/// potential descriptions.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer
/// (no sign change, divergent series, irregular system).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SummabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qdim
