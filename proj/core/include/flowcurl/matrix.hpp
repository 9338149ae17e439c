#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flowcurl {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  bool all_finite() const noexcept;
  /// Rows [first, first + count) as a new matrix.
  Matrix slice_rows(std::size_t first, std::size_t count) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// An n x d cloud of points. Metrics require n >= 2 and finite entries.
using SampleSet = Matrix;

namespace kernels {

/// C(M x N) += A(M x K) * B(K x N).
/// A(i, p) is read from A[i * a_row + p * a_col]; rows of B and C are contiguous with
/// strides ldb and ldc. Each element of C accumulates its K products in increasing p,
/// so results do not depend on M, N, or how the rows are blocked.
void gemm_acc(std::size_t M, std::size_t N, std::size_t K, const double* A, std::size_t a_row,
              std::size_t a_col, const double* B, std::size_t ldb, double* C, std::size_t ldc);

}  // namespace kernels
}  // namespace flowcurl
