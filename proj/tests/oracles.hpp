// Test-only reference implementations. Everything here is deliberately
// written as plain loops, independent of the library's compute paths, so the
// two sides of every comparison share no code.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bitserial/bitpack.hpp"
#include "bitserial/convolution.hpp"
#include "bitserial/matrix.hpp"
#include "bitserial/quantize.hpp"

namespace oracles {

using bitserial::ConvShape;
using bitserial::LevelMatrix;
using bitserial::Matrix;
using bitserial::MatrixF;
using bitserial::QuantParams;

// Triple-loop integer GEMM of level matrices, A (M x K) * B^T (B is N x K),
// accumulated in int64 so overflow in the implementation under test cannot
// hide here.
inline Matrix<std::int64_t> gemm_levels(const LevelMatrix& a,
                                        const LevelMatrix& b) {
  Matrix<std::int64_t> out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) {
      std::int64_t acc = 0;
      for (std::size_t t = 0; t < a.cols; ++t)
        acc += std::int64_t{a.at(i, t)} * b.at(j, t);
      out(i, j) = acc;
    }
  return out;
}

// Bit-by-bit and-dot over the logical region.
inline std::int64_t and_dot_bitloop(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b,
                                    std::size_t logical_len) {
  std::int64_t n = 0;
  for (std::size_t j = 0; j < logical_len; ++j) {
    const bool abit = (a[j / 64] >> (j % 64)) & 1u;
    const bool bbit = (b[j / 64] >> (j % 64)) & 1u;
    n += (abit && bbit) ? 1 : 0;
  }
  return n;
}

// Decode each bit as -1/+1 and take the plain dot product.
inline std::int64_t xnor_dot_pm1(std::span<const std::uint64_t> a,
                                 std::span<const std::uint64_t> b,
                                 std::size_t logical_len) {
  std::int64_t acc = 0;
  for (std::size_t j = 0; j < logical_len; ++j) {
    const int av = ((a[j / 64] >> (j % 64)) & 1u) ? 1 : -1;
    const int bv = ((b[j / 64] >> (j % 64)) & 1u) ? 1 : -1;
    acc += av * bv;
  }
  return acc;
}

// Dequantize both operands and multiply in double precision.
inline MatrixF gemm_dequant(const LevelMatrix& a, const QuantParams& pa,
                            const LevelMatrix& b, const QuantParams& pb) {
  MatrixF out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < a.cols; ++t)
        acc += (pa.offset + pa.scale * a.at(i, t)) *
               (pb.offset + pb.scale * b.at(j, t));
      out(i, j) = static_cast<float>(acc);
    }
  return out;
}

// Direct convolution in double precision with an explicit pad value. Input
// C_in x S^2, weights C_out x (C_in * k^2) in (channel, ky, kx) order.
inline MatrixF conv_direct(const MatrixF& input, const MatrixF& weights,
                           const ConvShape& shape, double pad_value) {
  const int s = shape.spatial, k = shape.kernel, os = shape.out_spatial();
  MatrixF out(shape.out_channels, static_cast<std::size_t>(os) * os);
  for (int co = 0; co < shape.out_channels; ++co)
    for (int oy = 0; oy < os; ++oy)
      for (int ox = 0; ox < os; ++ox) {
        double acc = 0.0;
        for (int c = 0; c < shape.in_channels; ++c)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int iy = oy - shape.pad + ky;
              const int ix = ox - shape.pad + kx;
              const double v =
                  (iy >= 0 && iy < s && ix >= 0 && ix < s)
                      ? input(c, static_cast<std::size_t>(iy) * s + ix)
                      : pad_value;
              acc += v * weights(co, (static_cast<std::size_t>(c) * k + ky) * k + kx);
            }
        out(co, static_cast<std::size_t>(oy) * os + ox) =
            static_cast<float>(acc);
      }
  return out;
}

// max |got - want| / max |want| (matrix-norm relative error).
inline double rel_error(const MatrixF& got, const MatrixF& want) {
  double max_diff = 0.0, max_want = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    max_diff = std::max(max_diff,
                        std::abs(double(got.data()[i]) - want.data()[i]));
    max_want = std::max(max_want, std::abs(double(want.data()[i])));
  }
  return max_diff / std::max(max_want, 1e-300);
}

inline LevelMatrix rand_levels(std::size_t rows, std::size_t cols, int bits,
                               std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, (1 << bits) - 1);
  LevelMatrix out(rows, cols, bits);
  for (auto& l : out.levels) l = static_cast<std::uint8_t>(dist(rng));
  return out;
}

inline MatrixF rand_normal(std::size_t rows, std::size_t cols,
                           std::mt19937_64& rng, float sigma = 1.0f) {
  std::normal_distribution<float> dist(0.0f, sigma);
  MatrixF out(rows, cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = dist(rng);
  return out;
}

// MSE of the affine quantizer on the samples; reimplements the rounding so
// the fit oracle does not depend on the library's quantizer.
inline double quantizer_mse(std::span<const float> samples, double offset,
                            double scale, int bits) {
  const double top = (1 << bits) - 1;
  double acc = 0.0;
  for (float s : samples) {
    const double t = (s - offset) / scale;
    double lv = std::floor(std::abs(t) + 0.5);  // half away from zero
    if (t < 0) lv = -lv;
    lv = std::min(std::max(lv, 0.0), top);
    const double d = s - (offset + scale * lv);
    acc += d * d;
  }
  return acc / static_cast<double>(samples.size());
}

struct GridFit {
  double offset = 0.0;
  double scale = 0.0;
  double mse = 0.0;
};

// Dense 2-D grid search for the best (offset, scale).
inline GridFit grid_search_fit(std::span<const float> samples, int bits,
                               double offset_lo, double offset_hi,
                               double offset_step, double scale_lo,
                               double scale_hi, double scale_step) {
  GridFit best{0.0, 0.0, 1e300};
  for (double o = offset_lo; o <= offset_hi + 1e-12; o += offset_step)
    for (double s = scale_lo; s <= scale_hi + 1e-12; s += scale_step) {
      const double m = quantizer_mse(samples, o, s, bits);
      if (m < best.mse) best = {o, s, m};
    }
  return best;
}

}  // namespace oracles
