#pragma once

#include <stdexcept>
#include <string>

namespace cscope {

/// Input violates an operation's precondition (bad parameters, infeasible
/// request, inconsistent fields). The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read or written, or its contents are malformed.
/// The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cscope
