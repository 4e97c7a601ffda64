// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ombal {

// Root of every error the library throws. The CLI maps ConfigError
// subclasses to exit code 1 and RuntimeFailure subclasses to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

// Malformed structured-text input. `line` is 1-based, 0 when unknown.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : ConfigError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An invariant on a named field was violated.
class ValidationError : public ConfigError {
 public:
  ValidationError(std::string field, const std::string& what)
      : ConfigError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class EmptyTasks : public ConfigError {
 public:
  EmptyTasks() : ConfigError("at least one task is required") {}
};

class WeightLengthMismatch : public ConfigError {
 public:
  WeightLengthMismatch(std::size_t got, std::size_t expected)
      : ConfigError("expected " + std::to_string(expected) + " weights, got " + std::to_string(got)) {}
};

class LengthMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IndexOutOfRange : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NonFiniteLoss : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class NonPositiveLoss : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class NonConvergence : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class DegenerateWindow : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class TrainingError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace ombal
