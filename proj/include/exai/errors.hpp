#pragma once

#include <stdexcept>
#include <string>

namespace exai {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument or a value that breaks a domain invariant (range, duplicates, unknown names).
struct ValidationError : Error {
  using Error::Error;
};

struct NotFoundError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}

  int line;
  int column;
};

struct AuthenticationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace exai
