#pragma once

#include <stdexcept>
#include <string>

namespace latentpara {

/// Vector or matrix shapes that must agree do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or schema-violating configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for every failure raised while talking to a black-box oracle.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
};

class TimeoutError : public OracleError {
 public:
  using OracleError::OracleError;
};

/// The peer answered, but not in the NDJSON shape we expect.
class ProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};

/// The peer answered {"ok": false, "error": ...}.
class RemoteError : public OracleError {
 public:
  using OracleError::OracleError;
};

/// An encoder changed its embedding size after the first response.
class DimensionDriftError : public OracleError {
 public:
  using OracleError::OracleError;
};

class UnknownSampleError : public OracleError {
 public:
  using OracleError::OracleError;
};

/// An oracle reported a value outside its documented range (e.g. IoU > 1).
class OutOfRangeError : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace latentpara
