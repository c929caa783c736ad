// Error types shared across the m3 library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace m3 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedLocation : public Error {
 public:
  using Error::Error;
};

class UnknownScheme : public Error {
 public:
  using Error::Error;
};

class MalformedTypeSymbol : public Error {
 public:
  using Error::Error;
};

class UnknownRelation : public Error {
 public:
  using Error::Error;
};

class DeclaredTypeConflict : public Error {
 public:
  using Error::Error;
};

class AmbiguousDeclaration : public Error {
 public:
  using Error::Error;
};

class MalformedModel : public Error {
 public:
  MalformedModel(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownSection : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& expected)
      : Error(std::to_string(line) + ":" + std::to_string(column) +
              ": expected " + expected),
        line_(line),
        column_(column),
        expected_(expected) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

class NotDeclared : public Error {
 public:
  using Error::Error;
};

class SourceUnavailable : public Error {
 public:
  using Error::Error;
};

class RegionMismatch : public Error {
 public:
  using Error::Error;
};

class InheritanceCycle : public Error {
 public:
  using Error::Error;
};

}  // namespace m3
