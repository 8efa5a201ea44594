#pragma once

#include <stdexcept>

namespace rrt {

// Invalid model or experiment parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of an operation (index past the end, empty input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A computation would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command line or unknown experiment name.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rrt
