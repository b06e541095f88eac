#pragma once

#include <stdexcept>
#include <string>

namespace hood {

/// Process exit codes used by the command-line tool. Every typed error below
/// maps onto exactly one of them.
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  validation = 3,
  io = 4,
  divergence = 5,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::validation; }
};

class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::usage; }
};

/// A value violates the invariants of its owning type.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Tensor, frame or file dimensions do not agree.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::io; }
};

// Malformed-file errors; each is distinguishable by type.
class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

class VersionError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedError : public IoError {
 public:
  using IoError::IoError;
};

class ChecksumError : public IoError {
 public:
  using IoError::IoError;
};

class SchemaError : public IoError {
 public:
  using IoError::IoError;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::divergence; }
};

}  // namespace hood
