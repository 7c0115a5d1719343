#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rrscale {

/// Base for every error the library reports. The CLI maps any Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("configuration error: " + field + ": " + what), field_(std::move(field)), reason_(what) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape error: " + what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error("lookup error: " + what) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument error: " + what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error("precondition failed: " + what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error("data error: " + what) {}
};

/// Malformed input line. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": parse error: " + what),
        source_(std::move(source)),
        line_(line) {}
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Structurally valid input that violates a cross-line invariant (rank gaps, score inversions,
/// duplicate keys).
class ValidationError : public Error {
 public:
  ValidationError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": validation error: " + what),
        source_(std::move(source)),
        line_(line) {}
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class TrainingError : public Error {
 public:
  TrainingError(long long step, const std::string& what)
      : Error("training error at step " + std::to_string(step) + ": " + what), step_(step) {}
  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error("fit error: " + what) {}
};

}  // namespace rrscale
