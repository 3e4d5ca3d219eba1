#pragma once

#include <stdexcept>
#include <string>

namespace scs {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate inputs to geometric routines (zero vectors, coincident points).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Bad configuration, corrupt dataset files, malformed detection files.
// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace scs
