#pragma once

#include <stdexcept>
#include <string>

namespace ecoflight {

// Base of everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// World generation could not meet its target.
class GenerationError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// Malformed or invariant-violating input document. The message names the
// offending location (byte offset or field path).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Physically meaningless argument to an energy-model function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller violated a planner precondition (e.g. occupied endpoint). Kept
// distinct from a search that simply finds no path.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid value: bad path, bad configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecoflight
