#pragma once

#include <cstdint>

#include "bitserial/bitpack.hpp"
#include "bitserial/kernels.hpp"
#include "bitserial/matrix.hpp"
#include "bitserial/quantize.hpp"

namespace bitserial {

// Convolution geometry for the benchmark layer family: S x S input, stride 1,
// batch 1. The lowering itself accepts any kernel >= 1.
struct ConvShape {
  int spatial = 0;       // input is spatial x spatial
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int pad = 0;  // 0 for 1x1, 1 for 3x3 "same" output

  int out_spatial() const {
    return (spatial + 2 * pad - kernel) / stride + 1;
  }
  void validate() const;
};

// Quantized activation tensor: channels-major, row-major spatial. The level
// matrix is channels x (height * width).
struct QuantTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  LevelMatrix levels;
  QuantParams params;
};

// Toeplitz lowering. Output row r lists the receptive field of output
// position r in (channel, ky, kx) order: column index
// (c * kernel + ky) * kernel + kx. Padding positions contribute level 0,
// which dequantizes to `offset`.
LevelMatrix im2col(const QuantTensor& input, const ConvShape& shape);

// Filter weights lowered to out_channels x (in_channels * kernel^2) rows in
// the same (channel, ky, kx) order as im2col, packed once at construction and
// reused across calls.
class FilterBank {
 public:
  FilterBank(const LevelMatrix& filters, const QuantParams& params,
             int in_channels, int kernel);

  int out_channels() const { return out_channels_; }
  int in_channels() const { return in_channels_; }
  int kernel() const { return kernel_; }
  const PackedBitMatrix& packed() const { return packed_; }

 private:
  int out_channels_ = 0;
  int in_channels_ = 0;
  int kernel_ = 0;
  PackedBitMatrix packed_;
};

// Quantized convolution via im2col -> pack -> affine_gemm -> reshape. Output
// is out_channels x out_spatial^2. Zero padding is applied in level space, so
// padded positions contribute the dequantized value of level 0 (= offset).
MatrixF conv_bitserial(const QuantTensor& input, const FilterBank& filters,
                       const ConvShape& shape, const TileConfig& cfg = {});

// 2 * out_spatial^2 * C_out * C_in * kernel^2 (multiply + add).
std::int64_t conv_gop_count(const ConvShape& shape);

}  // namespace bitserial
