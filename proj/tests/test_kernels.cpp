#include <gtest/gtest.h>

#include <omp.h>

#include "sketchls/errors.hpp"
#include "sketchls/kernels.hpp"
#include "test_util.hpp"

using namespace sketchls;

namespace {

std::vector<double> naive_matvec(const DenseMat& a, const std::vector<double>& x, bool transpose) {
  const DenseMat xm(x.size(), 1, x);
  const DenseMat y = testutil::naive_multiply(transpose ? testutil::naive_transpose(a) : a, xm);
  return {y.data().begin(), y.data().end()};
}

// Runs fn with 4 OpenMP threads even on a single-core machine.
template <class Fn>
auto with_threads(int n, Fn&& fn) {
  const int old = omp_get_max_threads();
  omp_set_num_threads(n);
  auto r = fn();
  omp_set_num_threads(old);
  return r;
}

}  // namespace

TEST(Matvec, IdentityDense) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_EQ(matvec(DenseMat::identity(3), x), x);
}

TEST(Matvec, SingleSparseEntry) {
  const SparseMat a = SparseMat::from_triplets(4, 1, {{1, 0, 2.0}});
  const std::vector<double> x{3};
  EXPECT_EQ(matvec(a, x), (std::vector<double>{0, 6, 0, 0}));
  const std::vector<double> y{1, 1, 1, 1};
  EXPECT_EQ(matvec(a, y, true), (std::vector<double>{2}));
}

TEST(Matvec, DenseMatchesNaive) {
  const DenseMat a = testutil::random_dense(7, 4, 11);
  const auto x = testutil::random_vector(4, 12);
  const auto y = testutil::random_vector(7, 13);
  EXPECT_LT(testutil::max_abs_diff(matvec(a, x), naive_matvec(a, x, false)), 1e-14);
  EXPECT_LT(testutil::max_abs_diff(matvec(a, y, true), naive_matvec(a, y, true)), 1e-14);
}

TEST(Matvec, SparseMatchesDense) {
  const SparseMat s = testutil::random_sparse(40, 13, 0.2, 14);
  const DenseMat d = s.to_dense();
  const auto x = testutil::random_vector(13, 15);
  const auto y = testutil::random_vector(40, 16);
  EXPECT_LT(testutil::max_abs_diff(matvec(s, x), naive_matvec(d, x, false)), 1e-14);
  EXPECT_LT(testutil::max_abs_diff(matvec(s, y, true), naive_matvec(d, y, true)), 1e-14);
}

TEST(Matvec, DimensionMismatchThrows) {
  const DenseMat a(3, 2);
  const std::vector<double> x(3);
  EXPECT_THROW(matvec(a, x), DimensionError);
  EXPECT_THROW(matvec(Matrix(SparseMat::from_dense(a)), std::vector<double>(2), true), DimensionError);
}

TEST(SerialVsOmp, GemvBitIdentical) {
  const DenseMat a = testutil::random_dense(1000, 37, 21);
  const auto x = testutil::random_vector(37, 22);
  const auto z = testutil::random_vector(1000, 23);
  std::vector<double> ys(1000), yo(1000), ts(37), to(37);
  kernels::serial::gemv(a, x, ys);
  kernels::serial::gemv_t(a, z, ts);
  with_threads(4, [&] {
    kernels::omp::gemv(a, x, yo);
    kernels::omp::gemv_t(a, z, to);
    return 0;
  });
  EXPECT_EQ(ys, yo);
  EXPECT_EQ(ts, to);
}

TEST(SerialVsOmp, SpmvBitIdentical) {
  const SparseMat a = testutil::random_sparse(900, 50, 0.05, 24);
  const auto x = testutil::random_vector(50, 25);
  std::vector<double> ys(900), yo(900);
  kernels::serial::spmv(a, x, ys);
  with_threads(4, [&] {
    kernels::omp::spmv(a, x, yo);
    return 0;
  });
  EXPECT_EQ(ys, yo);
}

TEST(SerialVsOmp, SparseTransposeViaCachedTranspose) {
  const SparseMat a = testutil::random_sparse(300, 40, 0.05, 26);
  const auto y = testutil::random_vector(300, 27);
  std::vector<double> scatter(40), cached(40);
  kernels::serial::spmv_t(a, y, scatter);
  SparseOperator op(a);
  op.apply_t(y, cached);
  // Both accumulate the entries of a column in increasing row order.
  EXPECT_EQ(scatter, cached);
}

TEST(SerialVsOmp, GemmBitIdentical) {
  const DenseMat a = testutil::random_dense(120, 30, 28);
  const DenseMat b = testutil::random_dense(30, 17, 29);
  const DenseMat s = kernels::serial::gemm(a, b);
  const DenseMat o = with_threads(4, [&] { return kernels::omp::gemm(a, b); });
  EXPECT_EQ(s, o);
  EXPECT_LT(testutil::max_abs_diff(s, testutil::naive_multiply(a, b)), 1e-12);
}

TEST(Operators, DenseAndSparseAgree) {
  const SparseMat s = testutil::random_sparse(60, 9, 0.3, 30);
  const DenseMat d = s.to_dense();
  const auto x = testutil::random_vector(9, 31);
  const auto y = testutil::random_vector(60, 32);
  std::vector<double> a1(60), a2(60), t1(9), t2(9);
  SparseOperator(s).apply(x, a1);
  DenseOperator(d).apply(x, a2);
  SparseOperator(s).apply_t(y, t1);
  DenseOperator(d).apply_t(y, t2);
  EXPECT_LT(testutil::max_abs_diff(a1, a2), 1e-14);
  EXPECT_LT(testutil::max_abs_diff(t1, t2), 1e-14);
}
