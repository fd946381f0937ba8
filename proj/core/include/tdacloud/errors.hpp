#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdacloud {

/// Broad failure category. The CLI maps each category onto an exit code.
enum class ErrorKind {
  argument,    // caller passed an invalid value
  data,        // input file or data set is malformed or unusable
  contract,    // an internal invariant was violated
  resource,    // a configured size limit was exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Malformed input text. `line` is 1-based; 0 when no line applies.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input geometry that the alpha backend cannot triangulate (all points
/// coplanar or collinear, or fewer than four distinct points).
class DegenerateInputError : public DataError {
 public:
  explicit DegenerateInputError(const std::string& what) : DataError(what) {}
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorKind::resource, what) {}
};

}  // namespace tdacloud
