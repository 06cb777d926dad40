#include "bitserial/convolution.hpp"

#include "bitserial/errors.hpp"

namespace bitserial {

void ConvShape::validate() const {
  if (spatial < 1 || in_channels < 1 || out_channels < 1)
    throw ShapeError("ConvShape: dimensions must be >= 1");
  if (kernel < 1) throw ShapeError("ConvShape: kernel must be >= 1");
  if (stride != 1) throw ShapeError("ConvShape: only stride 1 is supported");
  if (pad < 0) throw ShapeError("ConvShape: pad must be >= 0");
  if (spatial + 2 * pad < kernel)
    throw ShapeError("ConvShape: kernel does not fit the padded input");
}

LevelMatrix im2col(const QuantTensor& input, const ConvShape& shape) {
  shape.validate();
  if (input.channels != shape.in_channels || input.height != shape.spatial ||
      input.width != shape.spatial)
    throw ShapeError("im2col: input dims do not match shape");
  const int s = shape.spatial;
  const int k = shape.kernel;
  const int os = shape.out_spatial();
  LevelMatrix out(static_cast<std::size_t>(os) * os,
                  static_cast<std::size_t>(k) * k * shape.in_channels,
                  input.levels.bits);
  for (int oy = 0; oy < os; ++oy) {
    for (int ox = 0; ox < os; ++ox) {
      const std::size_t r = static_cast<std::size_t>(oy) * os + ox;
      for (int c = 0; c < shape.in_channels; ++c) {
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * shape.stride - shape.pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * shape.stride - shape.pad + kx;
            const std::size_t col =
                (static_cast<std::size_t>(c) * k + ky) * k + kx;
            if (iy >= 0 && iy < s && ix >= 0 && ix < s)
              out.at(r, col) = input.levels.at(c, static_cast<std::size_t>(iy) * s + ix);
            // out-of-range positions stay level 0 (dequantizes to offset)
          }
        }
      }
    }
  }
  return out;
}

FilterBank::FilterBank(const LevelMatrix& filters, const QuantParams& params,
                       int in_channels, int kernel)
    : out_channels_(static_cast<int>(filters.rows)),
      in_channels_(in_channels),
      kernel_(kernel) {
  if (in_channels < 1 || kernel < 1)
    throw ShapeError("FilterBank: dims must be >= 1");
  if (filters.cols != static_cast<std::size_t>(in_channels) * kernel * kernel)
    throw ShapeError("FilterBank: filter row length != in_channels * kernel^2");
  packed_ = pack_bit_planes(filters, params);
}

MatrixF conv_bitserial(const QuantTensor& input, const FilterBank& filters,
                       const ConvShape& shape, const TileConfig& cfg) {
  shape.validate();
  if (filters.out_channels() != shape.out_channels ||
      filters.in_channels() != shape.in_channels ||
      filters.kernel() != shape.kernel)
    throw ShapeError("conv_bitserial: filters do not match shape");
  const LevelMatrix patches = im2col(input, shape);
  const PackedBitMatrix packed = pack_bit_planes(patches, input.params);
  // filters (C_out x K) times patches^T (K x P) -> C_out x out_spatial^2
  return affine_gemm(filters.packed(), packed, cfg);
}

std::int64_t conv_gop_count(const ConvShape& shape) {
  const std::int64_t os = shape.out_spatial();
  return 2 * os * os * shape.out_channels * shape.in_channels * shape.kernel *
         shape.kernel;
}

}  // namespace bitserial
