#pragma once

#include <stdexcept>
#include <string>

namespace gencert {

// Bad input: wrong shapes, values outside a documented range, violated
// preconditions. The CLI maps these to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced NaN/inf where a finite value was required, or a
// solver could not reach its residual target. The CLI maps these to exit 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace gencert
