#include "sketchls/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sketchls/errors.hpp"
#include "sketchls/kernels.hpp"

namespace sketchls {

DenseMat::DenseMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMat::DenseMat(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("DenseMat: " + std::to_string(data_.size()) + " entries for a " +
                         std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  }
}

DenseMat DenseMat::identity(std::size_t n) {
  DenseMat eye(n, n);
  for (std::size_t i = 0; i < n; ++i) eye(i, i) = 1.0;
  return eye;
}

DenseMat DenseMat::transposed() const {
  DenseMat t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

DenseMat DenseMat::col_block(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw DimensionError("col_block: range exceeds column count");
  std::vector<double> block(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_),
                            data_.begin() + static_cast<std::ptrdiff_t>((first + count) * rows_));
  return DenseMat(rows_, count, std::move(block));
}

bool DenseMat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

SparseMat::SparseMat(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0)
    throw InvalidArgument("SparseMat: row pointer array must have rows+1 entries starting at 0");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != values_.size())
    throw InvalidArgument("SparseMat: nnz disagrees with the last row pointer");
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) throw InvalidArgument("SparseMat: row pointers decrease");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw InvalidArgument("SparseMat: column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw InvalidArgument("SparseMat: column indices not strictly increasing in a row");
      if (!std::isfinite(values_[k])) throw NonFiniteError("SparseMat: non-finite value");
    }
  }
}

SparseMat SparseMat::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) throw InvalidArgument("from_triplets: index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& t = entries[k];
    if (k > 0 && t.row == entries[k - 1].row && t.col == entries[k - 1].col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return SparseMat(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMat SparseMat::from_dense(const DenseMat& a) {
  std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        col_idx.push_back(j);
        values.push_back(a(i, j));
      }
    }
    row_ptr[i + 1] = values.size();
  }
  return SparseMat(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMat SparseMat::transposed() const {
  std::vector<std::size_t> ptr(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<std::size_t> next(ptr.begin(), ptr.end() - 1);
  std::vector<std::size_t> idx(nnz());
  std::vector<double> vals(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t dst = next[col_idx_[k]]++;
      idx[dst] = i;
      vals[dst] = values_[k];
    }
  }
  return SparseMat(cols_, rows_, std::move(ptr), std::move(idx), std::move(vals));
}

DenseMat SparseMat::to_dense() const {
  DenseMat a(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) a(i, col_idx_[k]) = values_[k];
  return a;
}

SparseMat SparseMat::row_scaled(std::span<const double> factors) const {
  if (factors.size() != rows_) throw DimensionError("row_scaled: one factor per row required");
  SparseMat out = *this;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out.values_[k] *= factors[i];
  return out;
}

SparseMat SparseMat::col_scaled(std::span<const double> factors) const {
  if (factors.size() != cols_) throw DimensionError("col_scaled: one factor per column required");
  SparseMat out = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] *= factors[col_idx_[k]];
  return out;
}

std::size_t rows_of(const Matrix& a) noexcept {
  return std::visit([](const auto& m) { return m.rows(); }, a);
}

std::size_t cols_of(const Matrix& a) noexcept {
  return std::visit([](const auto& m) { return m.cols(); }, a);
}

std::size_t nnz_of(const Matrix& a) noexcept {
  if (const auto* s = std::get_if<SparseMat>(&a)) return s->nnz();
  const auto& d = std::get<DenseMat>(a);
  return static_cast<std::size_t>(
      std::count_if(d.data().begin(), d.data().end(), [](double v) { return v != 0.0; }));
}

DenseMat to_dense(const Matrix& a) {
  if (const auto* s = std::get_if<SparseMat>(&a)) return s->to_dense();
  return std::get<DenseMat>(a);
}

double norm2(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  // Squares of tiny or huge entries under/overflow; redo those scaled.
  if (s >= 1e-280 && s <= 1e280) return std::sqrt(s);
  if (std::isnan(s)) return s;
  double amax = 0.0;
  for (double v : x) amax = std::max(amax, std::abs(v));
  if (amax == 0.0 || !std::isfinite(amax)) return amax;
  s = 0.0;
  for (double v : x) s += (v / amax) * (v / amax);
  return amax * std::sqrt(s);
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double max_abs(std::span<const double> x) noexcept {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

DenseMat multiply(const DenseMat& a, const DenseMat& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  return kernels::omp::gemm(a, b);
}

DenseMat multiply_tn(const DenseMat& a, const DenseMat& b) {
  if (a.rows() != b.rows()) throw DimensionError("multiply_tn: row counts differ");
  DenseMat c(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
  return c;
}

double frobenius_norm(const DenseMat& a) noexcept { return norm2(a.data()); }

}  // namespace sketchls
