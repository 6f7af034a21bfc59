#pragma once

#include <stdexcept>
#include <string>

namespace ppress {

// Exception hierarchy. The CLI maps each branch to a distinct exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input data (parse failures, ragged rows, NaN).
class DataError : public Error {
 public:
  using Error::Error;
};

// Corrupt, truncated or version-mismatched compressed bytes.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid reducer/application/campaign configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Downstream application failure (singular system, external command failure).
class ApplicationError : public Error {
 public:
  using Error::Error;
};

// A search problem without any acceptable configuration.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppress
