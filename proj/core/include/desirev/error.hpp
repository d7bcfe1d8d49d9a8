#pragma once

#include <stdexcept>
#include <string>

namespace desirev {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or invalid variant/profile combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (corpus, lexicon, vectors, weights).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Failure while training or running a model.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace desirev
