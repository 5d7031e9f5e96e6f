#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sketchls/analysis.hpp"
#include "sketchls/errors.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/testgen.hpp"

using namespace sketchls;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// max / median of the row norms of an orthonormal basis of A (full rank).
double row_norm_spread(const Matrix& a) {
  const DenseMat u = thin_qr(to_dense(a)).q;
  std::vector<double> rn(u.rows());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < u.cols(); ++j) s += u(i, j) * u(i, j);
    rn[i] = std::sqrt(s);
  }
  const double mx = *std::max_element(rn.begin(), rn.end());
  const double md = median(rn);
  return md > 0 ? mx / md : std::numeric_limits<double>::infinity();
}

}  // namespace

TEST(Families, NamesRoundTrip) {
  for (auto f : {Family::incoherent_dense, Family::semicoherent_dense, Family::coherent_dense,
                 Family::incoherent_sparse, Family::semicoherent_sparse, Family::coherent_sparse,
                 Family::identity_block, Family::from_file})
    EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_FALSE(parse_family("random").has_value());
}

TEST(IncoherentDense, PrescribedSpectrum) {
  const std::size_t d = 12;
  const auto sv = singular_values(gen_incoherent_dense(100, d, 1));
  for (std::size_t k = 0; k < d; ++k) {
    const double expect = 1.0 + (1e6 - 1.0) * static_cast<double>(d - 1 - k) / static_cast<double>(d - 1);
    EXPECT_NEAR(sv[k], expect, 1e-6 * expect);
  }
}

TEST(IncoherentDense, SingleColumn) {
  const DenseMat a = gen_incoherent_dense(10, 1, 2);
  double s = 0;
  for (double v : a.data()) s += v * v;
  EXPECT_NEAR(std::sqrt(s), 1.0, 1e-14);
}

TEST(IncoherentDense, CoherenceNearGaussianLevels) {
  int ok = 0;
  const double n = 2000, d = 50;
  const double cap = 3.0 * std::sqrt(d / n) * std::sqrt(std::log(n));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double mu = coherence(gen_incoherent_dense(2000, 50, seed));
    ok += mu < 1.0 && mu < cap;
  }
  EXPECT_GE(ok, 95);
}

TEST(IncoherentDense, RejectsWide) { EXPECT_THROW(gen_incoherent_dense(3, 5, 0), DimensionError); }

TEST(SemicoherentDense, StructureAndCoherence) {
  const DenseMat a = gen_semicoherent_dense(400, 10, 3);
  EXPECT_EQ(a(399, 9), 1.0 + 1e-8);
  EXPECT_EQ(a(0, 9), 1e-8);
  EXPECT_GE(coherence(a), 1.0 / std::sqrt(2.0) - 0.01);
  EXPECT_EQ(svd_compact(a, 1e-12).rank, 10u);
  EXPECT_THROW(gen_semicoherent_dense(100, 7, 0), InvalidArgument);
}

TEST(CoherentDense, StructureAndSeedFree) {
  const DenseMat a = gen_coherent_dense(300, 8);
  EXPECT_GE(coherence(a), 1.0 - 1e-6);
  EXPECT_EQ(svd_compact(a, 1e-12).rank, 8u);
  EXPECT_EQ(std::get<DenseMat>(generate({Family::coherent_dense, 300, 8, 0, 1, {}})),
            std::get<DenseMat>(generate({Family::coherent_dense, 300, 8, 0, 2, {}})));
}

TEST(IncoherentSparse, Density) {
  const SparseMat a = gen_incoherent_sparse(10000, 100, 4);
  const double density = static_cast<double>(a.nnz()) / 1e6;
  EXPECT_GE(density, 0.008);
  EXPECT_LE(density, 0.012);
}

TEST(IncoherentSparse, ConditionBracket) {
  int ok = 0;
  const int trials = 10;
  for (int seed = 0; seed < trials; ++seed) {
    const double k = condition_number(gen_incoherent_sparse(4000, 100, static_cast<std::uint64_t>(seed)).to_dense());
    ok += k >= 1e4 && k <= 1e8;
  }
  EXPECT_GE(ok, 9);
}

TEST(IncoherentSparse, FirstColumnValuesAreStandardNormal) {
  // Column 0 has scale 1; pool several draws for enough samples.
  double s1 = 0, s2 = 0, s4 = 0;
  std::size_t cnt = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const DenseMat a = gen_incoherent_sparse(20000, 2, seed).to_dense();
    for (double v : a.col(0))
      if (v != 0.0) {
        s1 += v;
        s2 += v * v;
        s4 += v * v * v * v;
        ++cnt;
      }
  }
  const double n = static_cast<double>(cnt);
  ASSERT_GT(cnt, 7000u);
  EXPECT_NEAR(s1 / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.06);
  EXPECT_NEAR(s4 / n, 3.0, 0.4);
}

TEST(IncoherentSparse, RejectsTooFewRows) { EXPECT_THROW(gen_incoherent_sparse(50, 5, 0), InvalidArgument); }

TEST(ScaledSparse, PatternUnchanged) {
  const std::uint64_t seed = 5;
  const SparseMat b = gen_incoherent_sparse(2000, 20, derive_seed(seed, "base"));
  const SparseMat s5 = gen_semicoherent_sparse(2000, 20, seed);
  const SparseMat s20 = gen_coherent_sparse(2000, 20, seed);
  EXPECT_EQ(s5.nnz(), b.nnz());
  EXPECT_EQ(s20.nnz(), b.nnz());
  EXPECT_TRUE(std::equal(s5.col_idx().begin(), s5.col_idx().end(), b.col_idx().begin()));
  // Row factors are g^5 and g^20 of the same draw g.
  for (std::size_t i = 0; i < 2000; ++i) {
    if (b.row_ptr()[i] == b.row_ptr()[i + 1]) continue;
    const std::size_t q = b.row_ptr()[i];
    const double g5 = s5.values()[q] / b.values()[q];
    const double g20 = s20.values()[q] / b.values()[q];
    EXPECT_NEAR(g20, std::pow(g5, 4.0), 1e-9 * std::abs(g20) + 1e-300);
    EXPECT_GE(g20, 0.0);
  }
}

TEST(ScaledSparse, RowNormSpreadOrdering) {
  std::vector<double> inc, semi, coh;
  // d = 120 leaves about 70% of rows nonempty, so the median row norm is positive.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    inc.push_back(row_norm_spread(gen_incoherent_sparse(1000, 120, derive_seed(seed, "base"))));
    semi.push_back(row_norm_spread(gen_semicoherent_sparse(1000, 120, seed)));
    coh.push_back(row_norm_spread(gen_coherent_sparse(1000, 120, seed)));
  }
  EXPECT_GT(median(coh), median(semi));
  EXPECT_GT(median(semi), median(inc));
}

TEST(IdentityBlock, RankAndCoherence) {
  const DenseMat a = gen_identity_block(100, 30, 20);
  EXPECT_EQ(svd_compact(a, 1e-12).rank, 20u);
  EXPECT_EQ(coherence(a), 1.0);
  EXPECT_THROW(gen_identity_block(100, 30, 31), InvalidArgument);
}

TEST(Rhs, Ones) {
  EXPECT_EQ(rhs_ones(3), (std::vector<double>{1, 1, 1}));
  EXPECT_DOUBLE_EQ(norm2(rhs_ones(49)), 7.0);
}

TEST(Generate, DeterministicInSeed) {
  for (auto f : {Family::incoherent_dense, Family::semicoherent_dense, Family::incoherent_sparse,
                 Family::semicoherent_sparse, Family::coherent_sparse}) {
    const ProblemSpec sp{f, 300, 6, 0, 77, {}};
    EXPECT_EQ(to_dense(generate(sp)), to_dense(generate(sp))) << to_string(f);
    ProblemSpec other = sp;
    other.seed = 78;
    EXPECT_NE(to_dense(generate(sp)), to_dense(generate(other))) << to_string(f);
  }
}
