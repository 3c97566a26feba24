#pragma once

#include <stdexcept>
#include <string>

namespace etrate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain where a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition (e.g. packet size inconsistent
/// with the codec mode, initial error outside the triggering envelope).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; message carries the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// State left the finite range or crossed the divergence threshold.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Packet cannot be decoded against the reception time.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace etrate
