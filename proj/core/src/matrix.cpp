#include "flowcurl/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "flowcurl/error.hpp"

namespace flowcurl {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) throw ShapeError("matrix value count does not match shape");
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) throw ShapeError("row slice out of range");
  return Matrix(count, cols_,
                std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                                    data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_)));
}

namespace kernels {
namespace {

constexpr std::size_t kRowTile = 4;
constexpr std::size_t kColTile = 16;

using Vec8 = double __attribute__((vector_size(64), aligned(8)));

template <std::size_t MR>
inline void full_tile(std::size_t K, const double* A, std::size_t a_row, std::size_t a_col,
                      const double* B, std::size_t ldb, double* C, std::size_t ldc) {
  static_assert(kColTile == 16);
  Vec8 lo[MR];
  Vec8 hi[MR];
  for (std::size_t i = 0; i < MR; ++i) {
    lo[i] = *reinterpret_cast<const Vec8*>(C + i * ldc);
    hi[i] = *reinterpret_cast<const Vec8*>(C + i * ldc + 8);
  }
  for (std::size_t p = 0; p < K; ++p) {
    const Vec8 b_lo = *reinterpret_cast<const Vec8*>(B + p * ldb);
    const Vec8 b_hi = *reinterpret_cast<const Vec8*>(B + p * ldb + 8);
    for (std::size_t i = 0; i < MR; ++i) {
      const double a = A[i * a_row + p * a_col];
      lo[i] += a * b_lo;
      hi[i] += a * b_hi;
    }
  }
  for (std::size_t i = 0; i < MR; ++i) {
    *reinterpret_cast<Vec8*>(C + i * ldc) = lo[i];
    *reinterpret_cast<Vec8*>(C + i * ldc + 8) = hi[i];
  }
}

inline void edge_tile(std::size_t rows, std::size_t cols, std::size_t K, const double* A,
                      std::size_t a_row, std::size_t a_col, const double* B, std::size_t ldb,
                      double* C, std::size_t ldc) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = C[i * ldc + j];
      for (std::size_t p = 0; p < K; ++p) acc += A[i * a_row + p * a_col] * B[p * ldb + j];
      C[i * ldc + j] = acc;
    }
  }
}

}  // namespace

void gemm_acc(std::size_t M, std::size_t N, std::size_t K, const double* A, std::size_t a_row,
              std::size_t a_col, const double* B, std::size_t ldb, double* C, std::size_t ldc) {
  const std::size_t n_full = N - N % kColTile;
  const std::size_t m_full = M - M % kRowTile;
  for (std::size_t j0 = 0; j0 < n_full; j0 += kColTile) {
    std::size_t i0 = 0;
    for (; i0 < m_full; i0 += kRowTile)
      full_tile<kRowTile>(K, A + i0 * a_row, a_row, a_col, B + j0, ldb, C + i0 * ldc + j0, ldc);
    for (; i0 < M; ++i0)
      full_tile<1>(K, A + i0 * a_row, a_row, a_col, B + j0, ldb, C + i0 * ldc + j0, ldc);
  }
  if (n_full < N) edge_tile(M, N - n_full, K, A, a_row, a_col, B + n_full, ldb, C + n_full, ldc);
}

}  // namespace kernels
}  // namespace flowcurl
