#pragma once

#include <stdexcept>
#include <string>

namespace lwc {

/// Base class for every domain error raised by the library. The CLI maps
/// these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// p divides the discriminant; use reduction_type() for such primes.
class BadReduction : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class DerivationFailure : public Error {
 public:
  using Error::Error;
};

class UnknownParameters : public Error {
 public:
  using Error::Error;
};

class EnvelopeFormat : public Error {
 public:
  using Error::Error;
};

class OutOfMemory : public Error {
 public:
  using Error::Error;
};

class InvalidHandle : public Error {
 public:
  using Error::Error;
};

class ScenarioFormat : public Error {
 public:
  using Error::Error;
};

}  // namespace lwc
