#pragma once

#include <stdexcept>
#include <string>

namespace sedge {

/// Bad input: a precondition or configuration check failed before any work.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A procedure ran but its promised postcondition does not hold on this input.
class PostconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sedge
