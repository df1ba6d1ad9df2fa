#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmsbn {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated: bad shape, index out of range,
/// unassigned label, wrong graph kind.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but exceeds what an exact enumeration routine
/// is willing to do (e.g. 2^K assignments for large K).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Model file is corrupt or carries an unsupported version.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lmsbn
