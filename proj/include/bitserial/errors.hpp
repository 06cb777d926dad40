#pragma once

#include <stdexcept>

namespace bitserial {

// Dimension or operand-size mismatch between arguments.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid input values: non-finite entries, degenerate sample sets.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration: bad QuantParams, TileConfig, sweep settings.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Corrupt data detected: out-of-range level, nonzero pad bit.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An accumulator-width bound would be violated.
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File read/write failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bitserial
