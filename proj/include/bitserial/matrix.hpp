#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bitserial {

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixI8 = Matrix<std::int8_t>;
using MatrixI32 = Matrix<std::int32_t>;

// Matrix of quantization level indices; every level must be < 2^bits.
struct LevelMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  int bits = 0;
  std::vector<std::uint8_t> levels;  // row-major

  LevelMatrix() = default;
  LevelMatrix(std::size_t r, std::size_t c, int b)
      : rows(r), cols(c), bits(b), levels(r * c, 0) {}

  std::uint8_t& at(std::size_t i, std::size_t j) { return levels[i * cols + j]; }
  std::uint8_t at(std::size_t i, std::size_t j) const {
    return levels[i * cols + j];
  }

  bool operator==(const LevelMatrix&) const = default;
};

}  // namespace bitserial
