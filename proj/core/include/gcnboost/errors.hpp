#pragma once

#include <stdexcept>
#include <string>

namespace gcnboost {

// Error categories map onto CLI exit codes: config 2, data 3, numeric 4.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg, long iteration = -1)
      : std::runtime_error(msg), iteration(iteration) {}

  // Iteration at which the failure was detected, -1 if not applicable.
  long iteration;
};

}  // namespace gcnboost
