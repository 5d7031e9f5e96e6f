#pragma once

// Matrix-vector and matrix-matrix kernels.
//
// Every hot loop exists twice: a straightforward serial reference in
// kernels::serial and an OpenMP version in kernels::omp. The OpenMP versions
// only split work across independent outputs and keep the per-output
// accumulation order of the serial loop, so both produce bit-identical
// results regardless of the thread count. Tests compare the two exactly.

#include <span>
#include <vector>

#include "sketchls/matrix.hpp"

namespace sketchls {

namespace kernels::serial {

void gemv(const DenseMat& a, std::span<const double> x, std::span<double> y);
void gemv_t(const DenseMat& a, std::span<const double> x, std::span<double> y);
void spmv(const SparseMat& a, std::span<const double> x, std::span<double> y);
/// y = A^T x by scattering over the rows of A.
void spmv_t(const SparseMat& a, std::span<const double> x, std::span<double> y);
DenseMat gemm(const DenseMat& a, const DenseMat& b);

}  // namespace kernels::serial

namespace kernels::omp {

void gemv(const DenseMat& a, std::span<const double> x, std::span<double> y);
void gemv_t(const DenseMat& a, std::span<const double> x, std::span<double> y);
void spmv(const SparseMat& a, std::span<const double> x, std::span<double> y);
DenseMat gemm(const DenseMat& a, const DenseMat& b);

}  // namespace kernels::omp

/// A*x, or A^T*x when `transpose` is set. Throws DimensionError.
std::vector<double> matvec(const DenseMat& a, std::span<const double> x, bool transpose = false);
std::vector<double> matvec(const SparseMat& a, std::span<const double> x, bool transpose = false);
std::vector<double> matvec(const Matrix& a, std::span<const double> x, bool transpose = false);

/// Sparse operand with its transpose cached, so both products run row-parallel.
class SparseOperator {
 public:
  explicit SparseOperator(const SparseMat& a) : a_(&a), at_(a.transposed()) {}

  const SparseMat& matrix() const noexcept { return *a_; }
  const SparseMat& transpose() const noexcept { return at_; }
  std::size_t rows() const noexcept { return a_->rows(); }
  std::size_t cols() const noexcept { return a_->cols(); }

  void apply(std::span<const double> x, std::span<double> y) const { kernels::omp::spmv(*a_, x, y); }
  void apply_t(std::span<const double> x, std::span<double> y) const {
    kernels::omp::spmv(at_, x, y);
  }

 private:
  const SparseMat* a_;
  SparseMat at_;
};

class DenseOperator {
 public:
  explicit DenseOperator(const DenseMat& a) : a_(&a) {}

  const DenseMat& matrix() const noexcept { return *a_; }
  std::size_t rows() const noexcept { return a_->rows(); }
  std::size_t cols() const noexcept { return a_->cols(); }

  void apply(std::span<const double> x, std::span<double> y) const { kernels::omp::gemv(*a_, x, y); }
  void apply_t(std::span<const double> x, std::span<double> y) const {
    kernels::omp::gemv_t(*a_, x, y);
  }

 private:
  const DenseMat* a_;
};

}  // namespace sketchls
