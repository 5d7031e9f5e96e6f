#include "sketchls/kernels.hpp"

#include <algorithm>
#include <string>

#include "sketchls/errors.hpp"

namespace sketchls {

namespace kernels::serial {

void gemv(const DenseMat& a, std::span<const double> x, std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    const auto col = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += col[i] * xj;
  }
}

void gemv_t(const DenseMat& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
}

void spmv(const SparseMat& a, std::span<const double> x, std::span<double> y) {
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = s;
  }
}

void spmv_t(const SparseMat& a, std::span<const double> x, std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) y[idx[k]] += val[k] * x[i];
}

DenseMat gemm(const DenseMat& a, const DenseMat& b) {
  DenseMat c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      const auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

}  // namespace kernels::serial

namespace kernels::omp {

namespace {
constexpr std::size_t kRowBlock = 256;
}

void gemv(const DenseMat& a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = a.rows();
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kRowBlock;
    const std::size_t hi = std::min(n, lo + kRowBlock);
    std::fill(y.begin() + static_cast<std::ptrdiff_t>(lo), y.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double xj = x[j];
      const auto col = a.col(j);
      for (std::size_t i = lo; i < hi; ++i) y[i] += col[i] * xj;
    }
  }
}

void gemv_t(const DenseMat& a, std::span<const double> x, std::span<double> y) {
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
}

void spmv(const SparseMat& a, std::span<const double> x, std::span<double> y) {
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = s;
  }
}

DenseMat gemm(const DenseMat& a, const DenseMat& b) {
  DenseMat c(a.rows(), b.cols());
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      const auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

}  // namespace kernels::omp

namespace {

void check_matvec_dims(std::size_t rows, std::size_t cols, std::size_t xlen, bool transpose) {
  const std::size_t expect = transpose ? rows : cols;
  if (xlen != expect) {
    throw DimensionError("matvec: vector of length " + std::to_string(xlen) + " for a " +
                         std::to_string(rows) + "x" + std::to_string(cols) +
                         (transpose ? " matrix (transposed)" : " matrix"));
  }
}

}  // namespace

std::vector<double> matvec(const DenseMat& a, std::span<const double> x, bool transpose) {
  check_matvec_dims(a.rows(), a.cols(), x.size(), transpose);
  std::vector<double> y(transpose ? a.cols() : a.rows());
  if (transpose)
    kernels::omp::gemv_t(a, x, y);
  else
    kernels::omp::gemv(a, x, y);
  return y;
}

std::vector<double> matvec(const SparseMat& a, std::span<const double> x, bool transpose) {
  check_matvec_dims(a.rows(), a.cols(), x.size(), transpose);
  std::vector<double> y(transpose ? a.cols() : a.rows());
  if (transpose)
    kernels::serial::spmv_t(a, x, y);
  else
    kernels::omp::spmv(a, x, y);
  return y;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x, bool transpose) {
  return std::visit([&](const auto& m) { return matvec(m, x, transpose); }, a);
}

}  // namespace sketchls
