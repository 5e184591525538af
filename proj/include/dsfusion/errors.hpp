#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsfusion {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dempster combination where every product of focal elements has an empty
// intersection (K >= 1 - 1e-12).
class TotalConflict : public Error {
 public:
  explicit TotalConflict(double conflict)
      : Error("total conflict between mass functions (K = " + std::to_string(conflict) + ")"),
        conflict_(conflict) {}
  double conflict() const noexcept { return conflict_; }

 private:
  double conflict_;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path) : Error("file not found: " + path) {}
};

// CSV problems carry the 1-based line and column they were found at.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class MissingValue : public ParseError {
 public:
  MissingValue(std::size_t line, std::size_t column) : ParseError("missing value", line, column) {}
};

class NonNumeric : public ParseError {
 public:
  NonNumeric(const std::string& cell, std::size_t line, std::size_t column)
      : ParseError("non-numeric value '" + cell + "'", line, column) {}
};

}  // namespace dsfusion
