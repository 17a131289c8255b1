#pragma once

#include <stdexcept>
#include <string>

namespace refcon {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes (2 for input/configuration problems, 3 for numerical faults).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t row, std::size_t column,
             const std::string& what)
      : Error(file + ":" + std::to_string(row) + ":" + std::to_string(column) +
              ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// Input tables disagree in shape or labels.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A value violates a data invariant (non-positive price, negative quantity).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

// Caller asked for something the configuration cannot supply (unknown base,
// missing population or exchange rates).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The data admit no reference consumer where one is required.
class InconsistentDataError : public Error {
 public:
  using Error::Error;
};

// Iteration failed to converge or an internal numerical invariant broke.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace refcon
