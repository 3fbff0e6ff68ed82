#pragma once

#include <stdexcept>
#include <string>

namespace rffkim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

/// Enumeration width or resource guard exceeded. The message names the limit.
class GuardError : public Error {
 public:
  using Error::Error;
};

class IncompatibleDistributions : public Error {
 public:
  using Error::Error;
};

/// A chain state violates the support of its target law.
class CorruptedState : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace rffkim
