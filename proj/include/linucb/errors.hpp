#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace linucb {

// Shape or size disagreement between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Fixed-point result does not fit the raw integer width.
struct OverflowError : std::range_error {
    using std::range_error::range_error;
};

// Zero (fixed point) or near-zero (float) pivot during inversion.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation called on a model variant that does not support it.
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

// Numerical failure inside a long run; carries the step it happened at.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what, std::int64_t step = -1)
        : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
          step(step) {}
    std::int64_t step;
};

}  // namespace linucb
