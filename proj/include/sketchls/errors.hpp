#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchls {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity found where finite values are required.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Rank detection found no column above the truncation threshold.
class RankZeroError : public Error {
 public:
  using Error::Error;
};

/// Exact triangular solve hit a zero pivot.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sketchls
