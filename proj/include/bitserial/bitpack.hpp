#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bitserial/matrix.hpp"
#include "bitserial/quantize.hpp"

namespace bitserial {

// Read-only view of one bit plane: rows x words_per_row machine words.
struct BitPlaneView {
  const std::uint64_t* data = nullptr;
  std::size_t rows = 0;
  std::size_t words_per_row = 0;
  std::size_t logical_cols = 0;

  const std::uint64_t* row(std::size_t i) const {
    return data + i * words_per_row;
  }
  BitPlaneView slice_rows(std::size_t first, std::size_t count) const {
    return {data + first * words_per_row, count, words_per_row, logical_cols};
  }
};

// Bit-plane decomposition of a LevelMatrix: plane k holds bit k of every
// element, packed little-endian into 64-bit words (column j lands in word
// j/64, bit j%64) and zero-padded to the word boundary. Per-row weighted
// popcount sums S[i] = sum_k 2^k * popcount(plane k, row i) are cached at
// pack time; they equal the row sums of the level values and feed the affine
// GEMM recombination. Immutable after construction.
class PackedBitMatrix {
 public:
  static constexpr std::size_t kWordBits = 64;

  PackedBitMatrix() = default;

  std::size_t rows() const { return rows_; }
  std::size_t logical_cols() const { return logical_cols_; }
  int bits() const { return bits_; }
  std::size_t words_per_row() const { return words_per_row_; }
  const QuantParams& params() const { return params_; }

  BitPlaneView plane(int k) const {
    return {words_.data() + static_cast<std::size_t>(k) * rows_ * words_per_row_,
            rows_, words_per_row_, logical_cols_};
  }
  std::span<const std::uint64_t> plane_row(int k, std::size_t i) const {
    return {plane(k).row(i), words_per_row_};
  }
  bool bit(int k, std::size_t i, std::size_t j) const {
    return (plane(k).row(i)[j / kWordBits] >> (j % kWordBits)) & 1u;
  }

  std::int64_t row_weighted_sum(std::size_t i) const { return row_sums_[i]; }
  std::span<const std::int64_t> row_weighted_sums() const { return row_sums_; }

 private:
  friend PackedBitMatrix pack_bit_planes(const LevelMatrix&,
                                         const QuantParams&);
  friend PackedBitMatrix quantize_and_pack(const MatrixF&, const QuantParams&);
  friend struct PackedBitMatrixTestAccess;  // tests corrupt pad bits

  PackedBitMatrix(std::size_t rows, std::size_t cols,
                  const QuantParams& params)
      : rows_(rows),
        logical_cols_(cols),
        words_per_row_((cols + kWordBits - 1) / kWordBits),
        bits_(params.bits),
        params_(params),
        words_(static_cast<std::size_t>(params.bits) * rows * words_per_row_,
               0),
        row_sums_(rows, 0) {}

  std::uint64_t& word(int k, std::size_t i, std::size_t w) {
    return words_[(static_cast<std::size_t>(k) * rows_ + i) * words_per_row_ +
                  w];
  }

  std::size_t rows_ = 0;
  std::size_t logical_cols_ = 0;
  std::size_t words_per_row_ = 0;
  int bits_ = 0;
  QuantParams params_{};
  std::vector<std::uint64_t> words_;  // [bits][rows][words_per_row]
  std::vector<std::int64_t> row_sums_;
};

// Throws ShapeError on a bits mismatch and IntegrityError if any level is
// >= 2^bits.
PackedBitMatrix pack_bit_planes(const LevelMatrix& levels,
                                const QuantParams& params);

// Exact inverse of pack_bit_planes over the logical region. Throws
// IntegrityError if a nonzero pad bit is found.
LevelMatrix unpack_bit_planes(const PackedBitMatrix& packed);

// Fused quantize + pack; bit-identical to
// pack_bit_planes(quantize_uniform(values, params), params).
PackedBitMatrix quantize_and_pack(const MatrixF& values,
                                  const QuantParams& params);

// Debug dump used by golden tests: a `logical_cols=<K>` header, then one line
// per row per plane: `plane=<k> row=<i>: <hex words space-separated>`.
std::string dump_planes(const PackedBitMatrix& packed);

}  // namespace bitserial
