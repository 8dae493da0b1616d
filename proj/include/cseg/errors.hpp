#pragma once

#include <stdexcept>
#include <string>

namespace cseg {

// Base for every error raised by the library. The CLI maps the concrete
// types onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file header or payload length.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed file whose values violate a data invariant (e.g. NaN scores).
class DataError : public Error {
 public:
  using Error::Error;
};

// Images or masks with mismatched dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, unknown keys, out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A referenced input file does not exist or cannot be opened.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

// An internal cross-check failed. Never expected in correct builds.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cseg
