#pragma once

#include <stdexcept>
#include <string>

namespace attrdesc {

// Computation/domain failures map to CLI exit code 1, ConfigError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Raised when the peer replied with an `error` message; what() is the peer's text verbatim.
class PeerError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class RendererError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace attrdesc
