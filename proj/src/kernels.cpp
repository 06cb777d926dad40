#include "bitserial/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <thread>
#include <vector>

#include "bitserial/errors.hpp"

namespace bitserial {

namespace detail {

int popcount64_table(std::uint64_t w) {
  static constexpr std::array<std::uint8_t, 16> kNibble = {
      0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4};
  int n = 0;
  for (; w != 0; w >>= 4) n += kNibble[w & 0xf];
  return n;
}

}  // namespace detail

namespace {

constexpr std::size_t kWordBits = PackedBitMatrix::kWordBits;
constexpr std::size_t kLaneMax = 65535;  // 16-bit accumulator ceiling

void check_dot_operands(std::span<const std::uint64_t> a,
                        std::span<const std::uint64_t> b,
                        std::size_t logical_len) {
  if (a.size() != b.size())
    throw ShapeError("binary dot: operand word counts differ");
  if (logical_len > a.size() * kWordBits)
    throw ShapeError("binary dot: logical length exceeds storage");
}

// One register tile over one plane pair. Popcounts accumulate in a 16-bit
// lane for cfg.k_block_words words at a time (each word adds at most 64, so
// the lane stays below 2^16) and spill to the 32-bit total at chunk ends; the
// plane weight is applied once per tile at the final spill into `out`.
void accumulate_plane_pair(const BitPlaneView& a, const BitPlaneView& b,
                           const TileConfig& cfg, std::int32_t weight,
                           std::int32_t* out, std::size_t out_stride) {
  const std::size_t words = a.words_per_row;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const std::uint64_t* arow = a.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const std::uint64_t* brow = b.row(j);
      std::int32_t total = 0;
      for (std::size_t w0 = 0; w0 < words; w0 += cfg.k_block_words) {
        const std::size_t w1 = std::min(words, w0 + cfg.k_block_words);
        std::uint16_t lane = 0;
        for (std::size_t w = w0; w < w1; ++w)
          lane = static_cast<std::uint16_t>(
              lane + std::popcount(arow[w] & brow[w]));
        total += lane;
      }
      out[i * out_stride + j] += weight * total;
    }
  }
}

void gemm_row_range(const PackedBitMatrix& a, const PackedBitMatrix& b,
                    const TileConfig& cfg, std::size_t row_first,
                    std::size_t row_last, MatrixI32& out) {
  for (std::size_t ib = row_first; ib < row_last; ib += cfg.l1_block_rows) {
    const std::size_t ie = std::min(row_last, ib + cfg.l1_block_rows);
    for (std::size_t jb = 0; jb < b.rows(); jb += cfg.l1_block_rows) {
      const std::size_t je = std::min(b.rows(), jb + cfg.l1_block_rows);
      for (std::size_t i0 = ib; i0 < ie; i0 += cfg.m_tile) {
        const std::size_t i1 = std::min(ie, i0 + cfg.m_tile);
        for (std::size_t j0 = jb; j0 < je; j0 += cfg.n_tile) {
          const std::size_t j1 = std::min(je, j0 + cfg.n_tile);
          for (int k = 0; k < a.bits(); ++k) {
            for (int l = 0; l < b.bits(); ++l) {
              accumulate_plane_pair(
                  a.plane(k).slice_rows(i0, i1 - i0),
                  b.plane(l).slice_rows(j0, j1 - j0), cfg,
                  std::int32_t{1} << (k + l),
                  out.data() + i0 * out.cols() + j0, out.cols());
            }
          }
        }
      }
    }
  }
}

}  // namespace

void TileConfig::validate() const {
  if (m_tile < 1 || n_tile < 1 || l1_block_rows < 1)
    throw ConfigError("TileConfig: tile sizes must be >= 1");
  if (k_block_words < 1 || k_block_words * kWordBits > kLaneMax)
    throw ConfigError("TileConfig: k_block_words * 64 must be <= 65535");
}

std::int64_t and_dot(std::span<const std::uint64_t> a,
                     std::span<const std::uint64_t> b,
                     std::size_t logical_len) {
  check_dot_operands(a, b, logical_len);
  std::int64_t total = 0;
  for (std::size_t w = 0; w < a.size(); ++w)
    total += std::popcount(a[w] & b[w]);
  return total;
}

std::int64_t xnor_dot(std::span<const std::uint64_t> a,
                      std::span<const std::uint64_t> b,
                      std::size_t logical_len) {
  check_dot_operands(a, b, logical_len);
  std::int64_t mismatched = 0;
  for (std::size_t w = 0; w < a.size(); ++w)
    mismatched += std::popcount(a[w] ^ b[w]);
  return static_cast<std::int64_t>(logical_len) - 2 * mismatched;
}

MatrixI32 microkernel(const BitPlaneView& a, const BitPlaneView& b,
                      const TileConfig& cfg) {
  cfg.validate();
  if (a.words_per_row != b.words_per_row || a.logical_cols != b.logical_cols)
    throw ShapeError("microkernel: operand reduction lengths differ");
  MatrixI32 out(a.rows, b.rows);
  accumulate_plane_pair(a, b, cfg, 1, out.data(), out.cols());
  return out;
}

MatrixI32 bitserial_gemm(const PackedBitMatrix& a, const PackedBitMatrix& b,
                         const TileConfig& cfg, int workers) {
  cfg.validate();
  if (a.logical_cols() != b.logical_cols())
    throw ShapeError("bitserial_gemm: reduction lengths differ");
  if (workers < 1)
    throw ConfigError("bitserial_gemm: workers must be >= 1");
  // Worst case entry: every plane pair contributes a full-K popcount, so the
  // weighted sum can reach (2^bits_a - 1)(2^bits_b - 1) * K.
  const double worst = static_cast<double>((1 << a.bits()) - 1) *
                       static_cast<double>((1 << b.bits()) - 1) *
                       static_cast<double>(a.logical_cols());
  if (worst >= 2147483648.0)
    throw OverflowError(
        "bitserial_gemm: plane-weighted sum may exceed the 32-bit "
        "accumulator; reduce K or bit depths");

  MatrixI32 out(a.rows(), b.rows());
  const std::size_t want =
      std::min<std::size_t>(static_cast<std::size_t>(workers),
                            std::max<std::size_t>(a.rows(), 1));
  if (want <= 1) {
    gemm_row_range(a, b, cfg, 0, a.rows(), out);
    return out;
  }

  // Split on L1 block boundaries; each task owns a disjoint band of output
  // rows, so results are bit-identical for any worker count.
  const std::size_t blocks =
      (a.rows() + cfg.l1_block_rows - 1) / cfg.l1_block_rows;
  const std::size_t per = (blocks + want - 1) / want;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < want; ++t) {
    const std::size_t first =
        std::min(a.rows(), t * per * cfg.l1_block_rows);
    const std::size_t last =
        std::min(a.rows(), (t + 1) * per * cfg.l1_block_rows);
    if (first >= last) break;
    pool.emplace_back([&, first, last] {
      gemm_row_range(a, b, cfg, first, last, out);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

MatrixF affine_gemm(const PackedBitMatrix& a, const PackedBitMatrix& b,
                    const TileConfig& cfg, int workers) {
  const MatrixI32 g = bitserial_gemm(a, b, cfg, workers);
  const double k = static_cast<double>(a.logical_cols());
  const double oa = a.params().offset, sa = a.params().scale;
  const double ob = b.params().offset, sb = b.params().scale;
  MatrixF out(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double row_term = k * oa * ob + ob * sa * a.row_weighted_sum(i);
    for (std::size_t j = 0; j < g.cols(); ++j) {
      out(i, j) = static_cast<float>(row_term +
                                     oa * sb * b.row_weighted_sum(j) +
                                     sa * sb * g(i, j));
    }
  }
  return out;
}

}  // namespace bitserial
