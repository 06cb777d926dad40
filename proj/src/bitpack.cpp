#include "bitserial/bitpack.hpp"

#include <algorithm>
#include <cstdio>

#include "bitserial/errors.hpp"

namespace bitserial {

namespace {

constexpr std::size_t kWordBits = PackedBitMatrix::kWordBits;

}  // namespace

PackedBitMatrix pack_bit_planes(const LevelMatrix& levels,
                                const QuantParams& params) {
  params.validate();
  if (levels.bits != params.bits)
    throw ShapeError("pack_bit_planes: level bits do not match params bits");
  PackedBitMatrix out(levels.rows, levels.cols, params);
  for (std::size_t i = 0; i < levels.rows; ++i) {
    std::int64_t row_sum = 0;
    for (std::size_t j = 0; j < levels.cols; ++j) {
      const std::uint8_t level = levels.at(i, j);
      if (level > params.max_level())
        throw IntegrityError("pack_bit_planes: level exceeds 2^bits - 1");
      for (int k = 0; k < params.bits; ++k)
        if ((level >> k) & 1u)
          out.word(k, i, j / kWordBits) |= std::uint64_t{1} << (j % kWordBits);
      row_sum += level;
    }
    out.row_sums_[i] = row_sum;
  }
  return out;
}

LevelMatrix unpack_bit_planes(const PackedBitMatrix& packed) {
  LevelMatrix out(packed.rows(), packed.logical_cols(), packed.bits());
  const std::size_t rem = packed.logical_cols() % kWordBits;
  const std::uint64_t pad_mask =
      rem == 0 ? 0 : ~((std::uint64_t{1} << rem) - 1);
  for (int k = 0; k < packed.bits(); ++k) {
    for (std::size_t i = 0; i < packed.rows(); ++i) {
      auto row = packed.plane_row(k, i);
      if (pad_mask != 0 && !row.empty() && (row.back() & pad_mask) != 0)
        throw IntegrityError("unpack_bit_planes: nonzero pad bit");
      for (std::size_t j = 0; j < packed.logical_cols(); ++j)
        if ((row[j / kWordBits] >> (j % kWordBits)) & 1u)
          out.at(i, j) |= static_cast<std::uint8_t>(1u << k);
    }
  }
  return out;
}

PackedBitMatrix quantize_and_pack(const MatrixF& values,
                                  const QuantParams& params) {
  params.validate();
  PackedBitMatrix out(values.rows(), values.cols(), params);
  for (std::size_t i = 0; i < values.rows(); ++i) {
    std::int64_t row_sum = 0;
    for (std::size_t w = 0; w < out.words_per_row_; ++w) {
      const std::size_t j0 = w * kWordBits;
      const std::size_t j1 = std::min(values.cols(), j0 + kWordBits);
      std::uint64_t plane_words[8] = {};
      for (std::size_t j = j0; j < j1; ++j) {
        const std::uint8_t level = quantize_value(values(i, j), params);
        for (int k = 0; k < params.bits; ++k)
          if ((level >> k) & 1u)
            plane_words[k] |= std::uint64_t{1} << (j - j0);
        row_sum += level;
      }
      for (int k = 0; k < params.bits; ++k) out.word(k, i, w) = plane_words[k];
    }
    out.row_sums_[i] = row_sum;
  }
  return out;
}

std::string dump_planes(const PackedBitMatrix& packed) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "logical_cols=%zu\n", packed.logical_cols());
  out += buf;
  for (int k = 0; k < packed.bits(); ++k) {
    for (std::size_t i = 0; i < packed.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "plane=%d row=%zu:", k, i);
      out += buf;
      for (std::uint64_t w : packed.plane_row(k, i)) {
        std::snprintf(buf, sizeof(buf), " %016llx",
                      static_cast<unsigned long long>(w));
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace bitserial
