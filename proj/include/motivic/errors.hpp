#pragma once

#include <stdexcept>
#include <string>

namespace motivic {

class MotivicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A series or integral whose terms do not tend to virtual dimension -infinity.
class DivergenceError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

/// A set or weight outside the constraint language the engine can count exactly.
class UnsupportedConstraintError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class DomainError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

/// Raised when truncated precision hides the information an operation needs.
class IndeterminateError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class FieldMismatchError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class PatternMismatchError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class NotInBigCellError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class BudgetExceededError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class ParseError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

class IndexUnderflowError : public MotivicError {
 public:
  using MotivicError::MotivicError;
};

}  // namespace motivic
