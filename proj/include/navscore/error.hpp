#pragma once

#include <stdexcept>
#include <string>

namespace navscore {

// Base for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files: bad JSON, missing keys, duplicate ids, bad lexicon lines.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Invalid metric configuration or config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An id present on one side of an evaluation but not the other (strict mode).
class MissingIdError : public Error {
 public:
  using Error::Error;
};

// Embedding backend could not serve a request (transport, timeout, protocol).
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

// The remote service answered, but the answer violates the wire protocol.
class ProtocolError : public BackendUnavailable {
 public:
  using BackendUnavailable::BackendUnavailable;
};

}  // namespace navscore
