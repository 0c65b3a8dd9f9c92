#pragma once

#include <stdexcept>
#include <string>

namespace nls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, grids or configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Blow-up, nonfinite values, or an iteration that failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File system and serialization failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nls
