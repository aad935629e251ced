#pragma once

#include <stdexcept>
#include <string>

namespace dsr {

/// Invalid caller input: bad ids, weights, dimensions, or parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not meet its contract (non-convergence,
/// missing root, exhausted sampling budget).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal problem recorded by a stage that still produced a result.
struct SoftFailure {
  std::string stage;
  std::string message;
};

}  // namespace dsr
