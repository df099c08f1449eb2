#pragma once

#include <stdexcept>
#include <string>

namespace spabm {

// Base class of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or index ranges that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or semantically invalid input data (files, labels, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

// An iterative method failed to reach its tolerance, or a numerical stage
// produced a degenerate result (e.g. an empty cluster).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spabm
