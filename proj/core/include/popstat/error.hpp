#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace popstat {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required column is missing or a config section is malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A data row could not be parsed. Carries the 1-based line number of the source.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Zero variance, too few points, empty intersections and similar.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace popstat
