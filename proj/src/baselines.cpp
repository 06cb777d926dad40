#include "bitserial/baselines.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "bitserial/errors.hpp"

namespace bitserial {

MatrixF gemm_f32_naive(const MatrixF& a, const MatrixF& b) {
  if (a.cols() != b.rows())
    throw ShapeError("gemm_f32: inner dimensions differ");
  MatrixF out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

MatrixF gemm_f32_blocked(const MatrixF& a, const MatrixF& b) {
  if (a.cols() != b.rows())
    throw ShapeError("gemm_f32: inner dimensions differ");
  constexpr std::size_t kBlock = 64;
  MatrixF out(a.rows(), b.cols(), 0.0f);
  // k ascends globally, so each out(i,j) sees the same float addition order
  // as the naive loop and the two agree bit for bit.
  for (std::size_t ib = 0; ib < a.rows(); ib += kBlock) {
    const std::size_t ie = std::min(a.rows(), ib + kBlock);
    for (std::size_t kb = 0; kb < a.cols(); kb += kBlock) {
      const std::size_t ke = std::min(a.cols(), kb + kBlock);
      for (std::size_t jb = 0; jb < b.cols(); jb += kBlock) {
        const std::size_t je = std::min(b.cols(), jb + kBlock);
        for (std::size_t i = ib; i < ie; ++i) {
          for (std::size_t k = kb; k < ke; ++k) {
            const float aik = a(i, k);
            float* orow = out.data() + i * out.cols();
            const float* brow = b.data() + k * b.cols();
            for (std::size_t j = jb; j < je; ++j) orow[j] += aik * brow[j];
          }
        }
      }
    }
  }
  return out;
}

MatrixI32 gemm_i8_i32(const MatrixI8& a, int a_zero, const MatrixI8& b,
                      int b_zero) {
  if (a.cols() != b.cols())
    throw ShapeError("gemm_i8_i32: reduction lengths differ");
  if (a_zero < -128 || a_zero > 127 || b_zero < -128 || b_zero > 127)
    throw DomainError("gemm_i8_i32: zero point outside int8 range");
  if (a.cols() >= (1u << 15))
    throw OverflowError("gemm_i8_i32: K >= 2^15 can overflow the 32-bit sum");
  MatrixI32 out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      std::int32_t acc = 0;
      const std::int8_t* arow = a.data() + i * a.cols();
      const std::int8_t* brow = b.data() + j * b.cols();
      for (std::size_t t = 0; t < a.cols(); ++t)
        acc += (static_cast<std::int32_t>(arow[t]) - a_zero) *
               (static_cast<std::int32_t>(brow[t]) - b_zero);
      out(i, j) = acc;
    }
  }
  return out;
}

namespace {

void check_conv_operands(const MatrixF& input, const MatrixF& weights,
                         const ConvShape& shape) {
  shape.validate();
  if (input.rows() != static_cast<std::size_t>(shape.in_channels) ||
      input.cols() !=
          static_cast<std::size_t>(shape.spatial) * shape.spatial)
    throw ShapeError("conv: input dims do not match shape");
  if (weights.rows() != static_cast<std::size_t>(shape.out_channels) ||
      weights.cols() != static_cast<std::size_t>(shape.in_channels) *
                            shape.kernel * shape.kernel)
    throw ShapeError("conv: weight dims do not match shape");
}

}  // namespace

MatrixF conv_f32_direct(const MatrixF& input, const MatrixF& weights,
                        const ConvShape& shape, float pad_value) {
  check_conv_operands(input, weights, shape);
  const int s = shape.spatial;
  const int k = shape.kernel;
  const int os = shape.out_spatial();
  MatrixF out(shape.out_channels, static_cast<std::size_t>(os) * os);
  for (int co = 0; co < shape.out_channels; ++co) {
    for (int oy = 0; oy < os; ++oy) {
      for (int ox = 0; ox < os; ++ox) {
        double acc = 0.0;
        for (int c = 0; c < shape.in_channels; ++c) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy - shape.pad + ky;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox - shape.pad + kx;
              const float v = (iy >= 0 && iy < s && ix >= 0 && ix < s)
                                  ? input(c, static_cast<std::size_t>(iy) * s + ix)
                                  : pad_value;
              acc += static_cast<double>(v) *
                     weights(co, (static_cast<std::size_t>(c) * k + ky) * k + kx);
            }
          }
        }
        out(co, static_cast<std::size_t>(oy) * os + ox) =
            static_cast<float>(acc);
      }
    }
  }
  return out;
}

MatrixF im2col_f32(const MatrixF& input, const ConvShape& shape,
                   float pad_value) {
  shape.validate();
  const int s = shape.spatial;
  const int k = shape.kernel;
  const int os = shape.out_spatial();
  MatrixF out(static_cast<std::size_t>(k) * k * shape.in_channels,
              static_cast<std::size_t>(os) * os);
  for (int oy = 0; oy < os; ++oy) {
    for (int ox = 0; ox < os; ++ox) {
      const std::size_t p = static_cast<std::size_t>(oy) * os + ox;
      for (int c = 0; c < shape.in_channels; ++c) {
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy - shape.pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox - shape.pad + kx;
            out((static_cast<std::size_t>(c) * k + ky) * k + kx, p) =
                (iy >= 0 && iy < s && ix >= 0 && ix < s)
                    ? input(c, static_cast<std::size_t>(iy) * s + ix)
                    : pad_value;
          }
        }
      }
    }
  }
  return out;
}

MatrixI8 im2col_i8(const MatrixI8& input, const ConvShape& shape,
                   std::int8_t pad_value) {
  shape.validate();
  const int s = shape.spatial;
  const int k = shape.kernel;
  const int os = shape.out_spatial();
  MatrixI8 out(static_cast<std::size_t>(os) * os,
               static_cast<std::size_t>(k) * k * shape.in_channels);
  for (int oy = 0; oy < os; ++oy) {
    for (int ox = 0; ox < os; ++ox) {
      const std::size_t p = static_cast<std::size_t>(oy) * os + ox;
      for (int c = 0; c < shape.in_channels; ++c) {
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy - shape.pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox - shape.pad + kx;
            out(p, (static_cast<std::size_t>(c) * k + ky) * k + kx) =
                (iy >= 0 && iy < s && ix >= 0 && ix < s)
                    ? input(c, static_cast<std::size_t>(iy) * s + ix)
                    : pad_value;
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// binary16 rounding

namespace {

std::uint16_t float_to_half_rne(float f) {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  const std::uint16_t sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
  const std::uint32_t exp_f = (x >> 23) & 0xffu;
  std::uint32_t mant = x & 0x007fffffu;
  if (exp_f == 0xffu)  // inf / nan
    return sign | 0x7c00u | (mant != 0 ? 0x200u : 0u);
  const int exp = static_cast<int>(exp_f) - 127 + 15;
  if (exp >= 31) return sign | 0x7c00u;  // overflow to infinity
  if (exp <= 0) {
    if (exp < -10) return sign;  // underflows to zero
    mant |= 0x00800000u;         // restore the implicit bit
    const int shift = 14 - exp;  // 14..24
    const std::uint32_t half_mant = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1);
    const std::uint32_t halfway = 1u << (shift - 1);
    std::uint16_t h = static_cast<std::uint16_t>(sign | half_mant);
    if (rem > halfway || (rem == halfway && (half_mant & 1u))) h += 1;
    return h;  // a carry here lands on the smallest normal, still correct
  }
  std::uint16_t h = static_cast<std::uint16_t>(
      sign | (static_cast<std::uint32_t>(exp) << 10) | (mant >> 13));
  const std::uint32_t rem = mant & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) h += 1;
  return h;  // mantissa carry rolls into the exponent, including to infinity
}

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  std::uint32_t exp = (h >> 10) & 0x1fu;
  std::uint32_t mant = h & 0x3ffu;
  std::uint32_t out;
  if (exp == 0) {
    if (mant == 0) {
      out = sign;
    } else {
      int e = -1;
      do {
        mant <<= 1;
        ++e;
      } while ((mant & 0x400u) == 0);
      out = sign | (static_cast<std::uint32_t>(127 - 15 - e) << 23) |
            ((mant & 0x3ffu) << 13);
    }
  } else if (exp == 31) {
    out = sign | 0x7f800000u | (mant << 13);
  } else {
    out = sign | ((exp - 15 + 127) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(out);
}

}  // namespace

float round_to_half(float v) { return half_to_float(float_to_half_rne(v)); }

// ---------------------------------------------------------------------------
// Winograd F(2x2, 3x3)
//
// Transform matrices:
//   B^T = [1 0 -1 0; 0 1 1 0; 0 -1 1 0; 0 1 0 -1]
//   G   = [1 0 0; 1/2 1/2 1/2; 1/2 -1/2 1/2; 0 0 1]
//   A^T = [1 1 1 0; 0 1 -1 -1]

namespace {

std::atomic<std::uint64_t> g_filter_transform_count{0};

struct FilterCacheKey {
  std::uint64_t content_hash;
  std::size_t out_channels;
  std::size_t in_channels;
  auto operator<=>(const FilterCacheKey&) const = default;
};

std::mutex g_filter_cache_mutex;
std::map<FilterCacheKey, std::shared_ptr<const std::vector<float>>>
    g_filter_cache;

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

// U = G g G^T for one 3x3 filter.
void transform_filter(const float* g, float* u) {
  float t[4][3];  // G g
  for (int c = 0; c < 3; ++c) {
    const float g0 = g[0 * 3 + c], g1 = g[1 * 3 + c], g2 = g[2 * 3 + c];
    t[0][c] = g0;
    t[1][c] = 0.5f * (g0 + g1 + g2);
    t[2][c] = 0.5f * (g0 - g1 + g2);
    t[3][c] = g2;
  }
  for (int r = 0; r < 4; ++r) {
    const float t0 = t[r][0], t1 = t[r][1], t2 = t[r][2];
    u[r * 4 + 0] = t0;
    u[r * 4 + 1] = 0.5f * (t0 + t1 + t2);
    u[r * 4 + 2] = 0.5f * (t0 - t1 + t2);
    u[r * 4 + 3] = t2;
  }
}

// V = B^T d B for one 4x4 input tile.
void transform_input_tile(const float d[4][4], float* v) {
  float t[4][4];  // B^T d
  for (int c = 0; c < 4; ++c) {
    t[0][c] = d[0][c] - d[2][c];
    t[1][c] = d[1][c] + d[2][c];
    t[2][c] = d[2][c] - d[1][c];
    t[3][c] = d[1][c] - d[3][c];
  }
  for (int r = 0; r < 4; ++r) {
    v[r * 4 + 0] = t[r][0] - t[r][2];
    v[r * 4 + 1] = t[r][1] + t[r][2];
    v[r * 4 + 2] = t[r][2] - t[r][1];
    v[r * 4 + 3] = t[r][1] - t[r][3];
  }
}

// Y = A^T m A, 2x2 output from one 4x4 elementwise product sum.
void transform_output_tile(const float* m, float y[2][2]) {
  float t[2][4];  // A^T m
  for (int c = 0; c < 4; ++c) {
    t[0][c] = m[0 * 4 + c] + m[1 * 4 + c] + m[2 * 4 + c];
    t[1][c] = m[1 * 4 + c] - m[2 * 4 + c] - m[3 * 4 + c];
  }
  for (int r = 0; r < 2; ++r) {
    y[r][0] = t[r][0] + t[r][1] + t[r][2];
    y[r][1] = t[r][1] - t[r][2] - t[r][3];
  }
}

// Returns the transformed filter set (C_out * C_in * 16 floats), computing
// and inserting it on a miss. The transform runs outside the lock; if two
// threads race, the first insert wins and the loser's identical work is
// discarded.
std::shared_ptr<const std::vector<float>> transformed_filters(
    const MatrixF& weights, std::size_t out_channels, std::size_t in_channels) {
  const FilterCacheKey key{
      fnv1a(weights.data(), weights.size() * sizeof(float)), out_channels,
      in_channels};
  {
    std::lock_guard<std::mutex> lock(g_filter_cache_mutex);
    auto it = g_filter_cache.find(key);
    if (it != g_filter_cache.end()) return it->second;
  }
  auto u = std::make_shared<std::vector<float>>(out_channels * in_channels * 16);
  for (std::size_t co = 0; co < out_channels; ++co) {
    for (std::size_t ci = 0; ci < in_channels; ++ci) {
      transform_filter(weights.data() + (co * in_channels + ci) * 9,
                       u->data() + (co * in_channels + ci) * 16);
      g_filter_transform_count.fetch_add(1, std::memory_order_relaxed);
    }
  }
  std::lock_guard<std::mutex> lock(g_filter_cache_mutex);
  auto [it, inserted] = g_filter_cache.emplace(key, std::move(u));
  return it->second;
}

}  // namespace

std::uint64_t winograd_filter_transform_count() {
  return g_filter_transform_count.load(std::memory_order_relaxed);
}

void winograd_cache_clear() {
  std::lock_guard<std::mutex> lock(g_filter_cache_mutex);
  g_filter_cache.clear();
}

MatrixF winograd_conv_3x3(const MatrixF& input, const MatrixF& weights,
                          const ConvShape& shape,
                          bool half_precision_intermediates) {
  if (shape.kernel != 3 || shape.stride != 1 || shape.pad != 1)
    throw ShapeError("winograd_conv_3x3: requires 3x3, stride 1, pad 1");
  check_conv_operands(input, weights, shape);
  const int s = shape.spatial;
  const int os = shape.out_spatial();  // == s
  const std::size_t cin = static_cast<std::size_t>(shape.in_channels);
  const std::size_t cout = static_cast<std::size_t>(shape.out_channels);

  const auto u = transformed_filters(weights, cout, cin);

  const int tiles = (os + 1) / 2;
  std::vector<float> v(cin * 16);
  std::vector<float> m(16);
  MatrixF out(cout, static_cast<std::size_t>(os) * os);

  for (int ty = 0; ty < tiles; ++ty) {
    for (int tx = 0; tx < tiles; ++tx) {
      // gather the 4x4 input tile per channel; the pad ring reads as zero
      for (std::size_t c = 0; c < cin; ++c) {
        float d[4][4];
        for (int r = 0; r < 4; ++r) {
          const int iy = 2 * ty - shape.pad + r;
          for (int q = 0; q < 4; ++q) {
            const int ix = 2 * tx - shape.pad + q;
            d[r][q] = (iy >= 0 && iy < s && ix >= 0 && ix < s)
                          ? input(c, static_cast<std::size_t>(iy) * s + ix)
                          : 0.0f;
          }
        }
        transform_input_tile(d, v.data() + c * 16);
      }
      if (half_precision_intermediates)
        for (float& x : v) x = round_to_half(x);

      for (std::size_t co = 0; co < cout; ++co) {
        m.assign(16, 0.0f);
        for (std::size_t c = 0; c < cin; ++c) {
          const float* uf = u->data() + (co * cin + c) * 16;
          const float* vf = v.data() + c * 16;
          if (half_precision_intermediates) {
            for (int t = 0; t < 16; ++t) m[t] += round_to_half(uf[t]) * vf[t];
          } else {
            for (int t = 0; t < 16; ++t) m[t] += uf[t] * vf[t];
          }
        }
        float y[2][2];
        transform_output_tile(m.data(), y);
        for (int r = 0; r < 2; ++r) {
          const int oy = 2 * ty + r;
          if (oy >= os) continue;
          for (int q = 0; q < 2; ++q) {
            const int ox = 2 * tx + q;
            if (ox >= os) continue;
            out(co, static_cast<std::size_t>(oy) * os + ox) = y[r][q];
          }
        }
      }
    }
  }
  return out;
}

}  // namespace bitserial
