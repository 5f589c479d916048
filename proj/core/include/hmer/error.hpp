#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (XML, LG, config). Carries the byte offset or line
/// number where parsing stopped, whichever the format tracks.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Structurally valid input that violates a data contract.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Incompatible tensor shapes passed to a numeric op.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A forward op produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Bad arguments to a public function.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace hmer
