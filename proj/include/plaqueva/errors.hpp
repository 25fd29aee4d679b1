#pragma once

#include <stdexcept>
#include <string>

namespace plaqueva {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text or bytes. Carries the 1-based row and the column
/// name when the failure is attributable to a single cell.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::string column = {})
      : Error(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Raised when a computation exceeds its deadline.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace plaqueva
