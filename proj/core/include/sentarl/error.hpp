#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentarl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input file content. Carries the 1-based line number
/// (0 when the problem is not tied to a line, e.g. a missing header).
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Input data that is well-formed but unusable (too short, empty, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or rejected numerical updates.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sentarl
