#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace sketchls {

// =============================================================================
/// Column-major dense matrix of doubles.
///
/// Factors produced internally may have a zero dimension (for example the
/// R12 block of a full-rank factorization); user-facing inputs are checked
/// for n, d >= 1 by the routines that consume them.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols);
  DenseMat(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMat identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  DenseMat transposed() const;
  /// Columns [first, first + count).
  DenseMat col_block(std::size_t first, std::size_t count) const;

  bool all_finite() const noexcept;

  friend bool operator==(const DenseMat&, const DenseMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// =============================================================================
/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; explicit zeros are allowed but never introduced by the
/// library.
class SparseMat {
 public:
  SparseMat() = default;
  /// Validates the CSR invariants and throws InvalidArgument on violation.
  SparseMat(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<double> values);

  /// Duplicate (row, col) pairs are summed.
  static SparseMat from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
  static SparseMat from_dense(const DenseMat& a);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// CSR of the transpose, i.e. the CSC layout of this matrix.
  SparseMat transposed() const;
  DenseMat to_dense() const;

  /// Scales row i by factors[i]; the sparsity pattern is unchanged.
  SparseMat row_scaled(std::span<const double> factors) const;
  SparseMat col_scaled(std::span<const double> factors) const;

  friend bool operator==(const SparseMat&, const SparseMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

using Matrix = std::variant<DenseMat, SparseMat>;

std::size_t rows_of(const Matrix& a) noexcept;
std::size_t cols_of(const Matrix& a) noexcept;
std::size_t nnz_of(const Matrix& a) noexcept;
DenseMat to_dense(const Matrix& a);

// -----------------------------------------------------------------------------
// Small vector helpers shared across modules.

double norm2(std::span<const double> x) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
double max_abs(std::span<const double> x) noexcept;

/// C = A * B.
DenseMat multiply(const DenseMat& a, const DenseMat& b);
/// C = A^T * B.
DenseMat multiply_tn(const DenseMat& a, const DenseMat& b);
/// Spectral-norm-free Frobenius norm.
double frobenius_norm(const DenseMat& a) noexcept;

}  // namespace sketchls
