#pragma once

#include <cstdint>
#include <span>

#include "bitserial/bitpack.hpp"
#include "bitserial/matrix.hpp"

namespace bitserial {

// Register / L1 blocking parameters for the bitserial GEMM driver. Popcounts
// accumulate in 16-bit lanes for k_block_words words at a time before
// spilling to 32 bits; each word contributes at most 64, so the lanes cannot
// overflow as long as k_block_words * 64 <= 65535. All values are
// correctness-invariant: any valid config yields bit-identical results.
struct TileConfig {
  std::size_t m_tile = 4;
  std::size_t n_tile = 4;
  std::size_t k_block_words = 256;  // 256 * 64 = 16384 per lane, 4x margin
  std::size_t l1_block_rows = 64;

  TileConfig() = default;
  // Throws ConfigError when the 16-bit lane bound or a minimum is violated.
  TileConfig(std::size_t m, std::size_t n, std::size_t k_words,
             std::size_t l1_rows)
      : m_tile(m), n_tile(n), k_block_words(k_words), l1_block_rows(l1_rows) {
    validate();
  }

  void validate() const;
};

// sum popcount(a & b): the number of positions where both bits are set.
// Operands must have equal word counts and zero pad bits.
std::int64_t and_dot(std::span<const std::uint64_t> a,
                     std::span<const std::uint64_t> b, std::size_t logical_len);

// +-1 inner product of two bipolar planes: logical_len - 2 * popcount(a ^ b).
// Zero pads in both operands xor to zero, and using logical_len rather than
// the padded length excludes the spurious (-1)(-1) pad contributions.
std::int64_t xnor_dot(std::span<const std::uint64_t> a,
                      std::span<const std::uint64_t> b, std::size_t logical_len);

// Single-plane-pair register-tile kernel: out[i][j] = and_dot(a row i,
// b row j), with the 16-bit chunked accumulation contract described on
// TileConfig.
MatrixI32 microkernel(const BitPlaneView& a, const BitPlaneView& b,
                      const TileConfig& cfg = {});

// out[i][j] = sum_{k,l} 2^{k+l} * and_dot(A plane k row i, B plane l row j),
// i.e. the exact integer product levels(A) * levels(B)^T (B is N x K
// row-major). Entry is rejected with OverflowError unless
// (2^bits_a - 1)(2^bits_b - 1) * K fits a signed 32-bit accumulator.
// workers > 1 partitions output rows over threads; results are bit-identical
// for any worker count.
MatrixI32 bitserial_gemm(const PackedBitMatrix& a, const PackedBitMatrix& b,
                         const TileConfig& cfg = {}, int workers = 1);

// Affine recombination over the cached row sums:
//   out[i][j] = K*oa*ob + oa*sb*S_b[j] + ob*sa*S_a[i] + sa*sb*G[i][j]
// which equals the real GEMM of the two dequantized matrices.
MatrixF affine_gemm(const PackedBitMatrix& a, const PackedBitMatrix& b,
                    const TileConfig& cfg = {}, int workers = 1);

namespace detail {
// Nibble-table popcount for platforms without the instruction; must agree
// with std::popcount bit for bit.
int popcount64_table(std::uint64_t w);
}  // namespace detail

}  // namespace bitserial
