#pragma once

#include <stdexcept>
#include <string>

namespace absa {

// Input content violates a format or a model invariant. The CLI maps this
// to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem or network failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace absa
