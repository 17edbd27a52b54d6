#pragma once

#include <stdexcept>
#include <string>

namespace llp {

// Invalid user input: bad parameters, malformed files, contract violations
// detectable before any computation.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure during computation (non-finite chain state, unwritable output, ...).
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace llp
