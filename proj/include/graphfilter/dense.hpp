#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace graphfilter {

/// Dense row-major matrix of doubles. Node feature matrices, dense operator
/// snapshots and eigenvector bases all use this type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// N x F node features; rows are nodes.
using FeatureMatrix = Matrix;

Matrix transpose(const Matrix& a);

/// C = A * B. Row-major i-k-j ordering so each inner step is an axpy.
Matrix matmul(const Matrix& a, const Matrix& b);

/// C = A^T * B without materialising the transpose.
Matrix matmul_transposed_left(const Matrix& a, const Matrix& b);

/// y = a*x + b*y elementwise; shapes must match.
void axpby(double a, const Matrix& x, double b, Matrix& y);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

/// True when every entry is finite.
bool all_finite(const Matrix& a);

/// Throws DimensionMismatch if the shapes differ.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

}  // namespace graphfilter
