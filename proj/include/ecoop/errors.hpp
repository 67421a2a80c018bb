// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecoop {

/// Input or state that violates a documented precondition. The CLI maps
/// these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The LP engine could not produce a certified answer. The CLI maps these
/// to exit code 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoundViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DischargeExceedsStorage : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidState : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GammaOutOfRange : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when the storage-maximization pass cannot meet the cost budget
/// found by the cost-minimization pass. Never expected in practice.
class Stage2Infeasible : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace ecoop
