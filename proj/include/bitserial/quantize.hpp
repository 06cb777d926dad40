#pragma once

#include <span>
#include <vector>

#include "bitserial/matrix.hpp"

namespace bitserial {

// Affine uniform quantizer: level L dequantizes to offset + scale * L, so the
// representable range is exactly [offset, offset + (2^bits - 1) * scale].
struct QuantParams {
  int bits = 8;
  double offset = 0.0;
  double scale = 1.0;

  int max_level() const { return (1 << bits) - 1; }
  double dequantize_level(int level) const { return offset + scale * level; }

  // Throws ConfigError if bits is outside 1..8 or scale is not positive.
  void validate() const;

  bool operator==(const QuantParams&) const = default;
};

// 1-bit {-1,+1} encoding: level 0 -> -1, level 1 -> +1. Quantizing thresholds
// at zero (v >= 0 maps to +1).
inline constexpr QuantParams kBipolar{1, -1.0, 2.0};

// clamp(round((v - offset) / scale), 0, 2^bits - 1); ties round away from
// zero so packed fixtures are bit-exact across platforms. Throws DomainError
// on non-finite input.
std::uint8_t quantize_value(float v, const QuantParams& params);
LevelMatrix quantize_uniform(const MatrixF& values, const QuantParams& params);

MatrixF dequantize(const LevelMatrix& levels, const QuantParams& params);

struct QuantFit {
  QuantParams params;
  // Empirical MSE after each completed iteration; non-increasing.
  std::vector<double> mse_history;
};

// Fits (offset, scale) to the samples by Lloyd-style alternation: assign each
// sample to its nearest level, re-solve both parameters by least squares on
// the assignments, repeat until the assignments stabilize or max_iters is
// reached. Throws DomainError when fewer than two distinct values are given.
QuantFit fit_uniform_quantizer(std::span<const float> samples, int bits,
                               int max_iters);

}  // namespace bitserial
