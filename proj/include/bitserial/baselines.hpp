#pragma once

#include <cstdint>

#include "bitserial/convolution.hpp"
#include "bitserial/matrix.hpp"

namespace bitserial {

// Reference float32 GEMM, A (M x K) * B (K x N). The blocked variant visits
// the reduction dimension in the same ascending order as the naive loop, so
// the two produce bit-identical float sums.
MatrixF gemm_f32_naive(const MatrixF& a, const MatrixF& b);
MatrixF gemm_f32_blocked(const MatrixF& a, const MatrixF& b);

// Zero-point int8 GEMM: out[i][j] = sum_t (A[i][t] - a_zero)(B[j][t] -
// b_zero), 32-bit exact. B is N x K row-major. K >= 2^15 is rejected with
// OverflowError (products can reach 2^16, so the 32-bit sum is only
// guaranteed below that depth).
MatrixI32 gemm_i8_i32(const MatrixI8& a, int a_zero, const MatrixI8& b,
                      int b_zero);

// Textbook direct convolution with a configurable pad value; accumulates in
// double. Input is C_in x S^2, weights C_out x (C_in * kernel^2) in
// (channel, ky, kx) order, output C_out x out_spatial^2.
MatrixF conv_f32_direct(const MatrixF& input, const MatrixF& weights,
                        const ConvShape& shape, float pad_value = 0.0f);

// Dense float lowering producing one column per output position:
// (C_in * kernel^2) x out_spatial^2, composable with gemm_f32_* as
// weights * patches.
MatrixF im2col_f32(const MatrixF& input, const ConvShape& shape,
                   float pad_value = 0.0f);

// int8 lowering with one row per output position (P x K), matching the
// gemm_i8_i32 operand layout.
MatrixI8 im2col_i8(const MatrixI8& input, const ConvShape& shape,
                   std::int8_t pad_value);

// F(2x2, 3x3) Winograd convolution, stride 1, pad 1. The filter transform is
// computed once per weight set and cached; with half_precision_intermediates
// set, transformed input and filter tiles are rounded to binary16
// (round-to-nearest-even) before the elementwise product.
MatrixF winograd_conv_3x3(const MatrixF& input, const MatrixF& weights,
                          const ConvShape& shape,
                          bool half_precision_intermediates = false);

// Number of per-filter transforms performed so far; stays flat across calls
// that hit the cache.
std::uint64_t winograd_filter_transform_count();
void winograd_cache_clear();

// Rounds a float onto the binary16 grid (1/5/10 split, round-to-nearest-even,
// subnormals exact, overflow to infinity). Numeric rounding only; no storage
// format is implied.
float round_to_half(float v);

}  // namespace bitserial
