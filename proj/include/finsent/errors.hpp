#pragma once

#include <stdexcept>

namespace finsent {

// Bad inputs: malformed files, out-of-range config values, shape mismatches
// detected at validation time. Mapped to CLI exit code 2.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure during a run (NaN/Inf in a tensor op, diverged loss).
// Mapped to CLI exit code 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace finsent
