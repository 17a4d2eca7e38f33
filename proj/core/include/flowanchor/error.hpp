#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowanchor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or out-of-range parameter.
class ValueError : public Error {
 public:
  using Error::Error;
};

/// A tensor, mask or image file could not be parsed.
class FormatError : public Error {
 public:
  enum class Kind {
    kTruncatedHeader,
    kMalformedHeader,
    kDimOverflow,
    kTruncatedPayload,
    kTrailingData,
    kUnsupportedFormat,
    kZeroSize,
    kIo,
  };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class UnknownConditionError : public Error {
 public:
  using Error::Error;
};

/// The editing trajectory produced a NaN or Inf.
class NonFiniteError : public Error {
 public:
  NonFiniteError(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace flowanchor
