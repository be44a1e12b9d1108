#pragma once

#include <stdexcept>
#include <string>

namespace gencs {

// Process exit codes used by the command-line tool. Every exception thrown by
// the library maps onto exactly one of these.
enum class ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kIo = 2,
  kNumerical = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad argument, violated precondition or malformed configuration.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ExitCode::kValidation, what) {}
};

class BoundsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Filter recurrences are designed for one sampling rate; callers must resample.
class RateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

// Malformed serialized stream (GeMREM, template or measurement files).
class ParseError : public IoError {
 public:
  using IoError::IoError;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ExitCode::kNumerical, what) {}
};

}  // namespace gencs
