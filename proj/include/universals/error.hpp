#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace universals {

// Base of everything the library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. row/column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t row, std::size_t column,
             const std::string& what)
      : Error(source + ":" + std::to_string(row) + ":" + std::to_string(column) +
              ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// Well-formed input that violates a documented invariant or precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A quantity that has no value for the given data (e.g. an empty group).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace universals
