#pragma once

#include <stdexcept>
#include <string>

namespace pat {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Frames, videos or tensors whose dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value outside its permitted interval (e.g. pixel intensity > 1).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk data.
class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Filesystem failures: missing files, unwritable paths.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A library invariant was violated; indicates a bug rather than bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace pat
