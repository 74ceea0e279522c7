#pragma once

#include <stdexcept>
#include <string>

namespace codemask {

// Base for every error the library raises. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LexError : public Error {
 public:
  LexError(int line, const std::string& what) : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class StructureError : public Error {
 public:
  using Error::Error;
};

class UnresolvedPlaceholderError : public Error {
 public:
  using Error::Error;
};

// A statistical test whose preconditions leave it undefined (no discordant
// pairs, all-zero differences).
class UndefinedTestError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class FormatVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace codemask
