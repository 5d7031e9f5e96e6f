#include <gtest/gtest.h>

#include <cmath>

#include "sketchls/analysis.hpp"
#include "sketchls/errors.hpp"
#include "sketchls/kernels.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/testgen.hpp"
#include "sketchls/transforms.hpp"
#include "test_util.hpp"

using namespace sketchls;
using testutil::naive_multiply;
using testutil::naive_transpose;

namespace {

DenseMat orthonormal(std::size_t n, std::size_t r, std::uint64_t seed) {
  return thin_qr(testutil::random_dense(n, r, seed)).q;
}

}  // namespace

TEST(Coherence, IdentityBlockIsOne) {
  EXPECT_NEAR(coherence(gen_identity_block(50, 10, 10)), 1.0, 1e-14);
  EXPECT_NEAR(coherence(gen_identity_block(50, 10, 4)), 1.0, 1e-14);
}

TEST(Coherence, EqualRowNormsGiveLowerBound) {
  // First r columns of the normalized Walsh-Hadamard matrix.
  const std::size_t n = 64, r = 8;
  DenseMat h(n, r);
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto c = fwht(e);
    std::copy(c.begin(), c.end(), h.col(j).begin());
  }
  EXPECT_NEAR(coherence(h), std::sqrt(static_cast<double>(r) / n), 1e-13);
}

TEST(Coherence, GaussianStrictlyInsideBounds) {
  const double mu = coherence(testutil::random_dense(50, 5, 71));
  EXPECT_GT(mu, std::sqrt(5.0 / 50));
  EXPECT_LT(mu, 1.0);
}

TEST(Coherence, ZeroMatrixThrows) { EXPECT_THROW(coherence(DenseMat(4, 2)), RankZeroError); }

TEST(NonUniformity, Basics) {
  EXPECT_EQ(non_uniformity(std::vector<double>{0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(non_uniformity(std::vector<double>{1, 1, 1, 1}), 0.5);
  EXPECT_THROW(non_uniformity(std::vector<double>{0, 0}), InvalidArgument);
}

TEST(NonUniformity, BoundedByCoherence) {
  const std::vector<Matrix> mats{testutil::random_dense(40, 6, 72), gen_semicoherent_dense(60, 8, 73),
                                 gen_coherent_sparse(300, 5, 74)};
  for (const auto& a : mats) {
    const double mu = coherence(a);
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto y = matvec(a, testutil::random_vector(cols_of(a), 1000 + t));
      EXPECT_LE(non_uniformity(y), mu + 1e-12);
    }
  }
}

TEST(Coherence, WithinBoundsForGeneratedMatrices) {
  const std::vector<Matrix> mats{gen_incoherent_dense(200, 10, 1), gen_semicoherent_dense(200, 10, 2),
                                 gen_coherent_dense(200, 10),      gen_incoherent_sparse(500, 10, 3),
                                 gen_semicoherent_sparse(500, 10, 4), gen_coherent_sparse(500, 10, 5)};
  for (const auto& a : mats) {
    const DenseMat u = range_basis(a);
    const double mu = coherence_of_basis(u);
    EXPECT_GE(mu, std::sqrt(static_cast<double>(u.cols()) / rows_of(a)) - 1e-12);
    EXPECT_LE(mu, 1.0 + 1e-12);
  }
}

TEST(Distortion, IdealSketchHasZeroDistortion) {
  const DenseMat a = testutil::random_dense(30, 4, 75);
  const DenseMat u = range_basis(a);
  const SketchOp s(GaussianSketch{naive_transpose(u)});
  const DistortionReport r = embedding_distortion(s, a);
  EXPECT_NEAR(r.epsilon, 0.0, 1e-13);
  EXPECT_TRUE(r.rank_preserved);
}

TEST(Distortion, SignedPermutationPreservesNorms) {
  const std::size_t n = 12;
  DenseMat p(n, n);
  RandomStream rs(5, 0);
  for (std::size_t j = 0; j < n; ++j) p((j * 5) % n, j) = rs.sign();
  const DistortionReport r = embedding_distortion(SketchOp(GaussianSketch{p}), testutil::random_dense(n, 3, 76));
  EXPECT_LE(r.epsilon, 1e-12);
}

TEST(Distortion, OneHashingFourDOnIncoherentDense) {
  const Matrix a = gen_incoherent_dense(1000, 20, 77);
  const FailureStats st = failure_stats({SketchKind::s_hashing, 80, 1, 78}, a, 0.9, 100);
  std::vector<double> eps;
  for (const auto& r : st.reports) eps.push_back(r.epsilon);
  std::nth_element(eps.begin(), eps.begin() + 50, eps.end());
  EXPECT_LT(eps[50], 0.9);
}

TEST(Distortion, BasisInvariance) {
  // Lemma-2 equivalence: distortion depends only on range(A).
  const Matrix a = gen_semicoherent_dense(80, 6, 79);
  const DenseMat u = range_basis(a);
  const SketchOp s = draw_sketch({SketchKind::s_hashing, 20, 2, 80}, 80);
  const auto ra = embedding_distortion(s, a);
  const auto ru = embedding_distortion_basis(s, u);
  EXPECT_NEAR(ra.epsilon, ru.epsilon, 1e-10);
  EXPECT_NEAR(ra.sigma_min, ru.sigma_min, 1e-10);
}

TEST(Distortion, FewerRowsThanRankLosesRank) {
  const SketchOp s = draw_sketch({SketchKind::gaussian, 3, 1, 81}, 40);
  const auto r = embedding_distortion(s, testutil::random_dense(40, 5, 82));
  EXPECT_FALSE(r.rank_preserved);
  EXPECT_EQ(r.sigma_min, 0.0);
  EXPECT_GE(r.epsilon, 1.0);
}

TEST(Distortion, RankPreservedWhenEpsilonBelowOne) {
  // rank(SA) from CPQR equals rank(A) whenever epsilon < 1.
  const DenseMat a = naive_multiply(testutil::random_dense(200, 6, 83), testutil::random_dense(6, 9, 84));
  const std::size_t rank_a = svd_compact(a, 1e-10).rank;
  ASSERT_EQ(rank_a, 6u);
  int checked = 0;
  for (std::uint64_t t = 0; t < 40; ++t) {
    const SketchOp s = draw_sketch({SketchKind::s_hashing, 40, 2, 900 + t}, 200);
    const auto r = embedding_distortion(s, a);
    if (r.epsilon >= 1.0) continue;
    ++checked;
    EXPECT_EQ(cpqr(apply_sketch(s, a), 1e-10).rank(), rank_a);
  }
  EXPECT_GT(checked, 20);
}

TEST(PrecondQuality, OrthonormalAWithExactQr) {
  // S = I, so f factors A itself.
  const DenseMat a = orthonormal(20, 5, 85);
  const CpqrFactors f = cpqr(a, 1e-12);
  EXPECT_NEAR(precond_quality(a, f), 1.0, 1e-12);
}

TEST(PrecondQuality, BoundedByDistortion) {
  const Matrix a = gen_incoherent_dense(400, 20, 86);
  const PreconditionerProbe probe(a);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const SketchOp s = draw_sketch({SketchKind::hr_dht, 40, 1, 300 + t}, 400);
    const auto rep = embedding_distortion(s, a);
    const CpqrFactors f = cpqr(apply_sketch(s, a), 1e-12);
    const double k = precond_quality(a, f);
    EXPECT_NEAR(probe.kappa(f), k, 1e-8 * k);
    if (rep.epsilon < 1.0) EXPECT_LE(k * k, (1 + rep.epsilon) / (1 - rep.epsilon) + 1e-8);
  }
}

TEST(PrecondQuality, CoherentSamplingWorseThanHashing) {
  const Matrix a = gen_coherent_dense(512, 40);
  const PreconditionerProbe probe(a);
  int hashing_better = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    double kh = std::numeric_limits<double>::infinity(), ks = kh;
    try {
      kh = probe.kappa(cpqr(apply_sketch(draw_sketch({SketchKind::hr_dht, 60, 1, t}, 512), a), 1e-12));
    } catch (const RankZeroError&) {
    }
    try {
      ks = probe.kappa(cpqr(apply_sketch(draw_sketch({SketchKind::sr_dht, 60, 1, t}, 512), a), 1e-12));
    } catch (const RankZeroError&) {
    }
    hashing_better += kh <= ks;
  }
  EXPECT_GE(hashing_better, 6);
}

TEST(RightSolve, MatchesTriSolve) {
  DenseMat r = testutil::random_dense(6, 6, 87);
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t i = j + 1; i < 6; ++i) r(i, j) = 0.0;
    r(j, j) = 2.0 + std::abs(r(j, j));
  }
  const DenseMat x = testutil::random_dense(9, 6, 88);
  const DenseMat y = right_solve_upper(x, r);
  EXPECT_LT(testutil::max_abs_diff(naive_multiply(y, r), x), 1e-13);
}

TEST(FailureRate, BirthdayBoundOnIdentityBlock) {
  const Matrix a = gen_identity_block(200, 20, 20);
  const FailureStats st = failure_stats({SketchKind::s_hashing, 20, 1, 89}, a, 1e300, 500);
  const double success = 1.0 - static_cast<double>(st.rank_losses) / 500;
  EXPECT_LE(success, std::exp(-20.0 * 19.0 / 40.0) + 0.05);
}

TEST(FailureRate, DeterministicAcrossThreadCounts) {
  const Matrix a = gen_semicoherent_dense(100, 6, 90);
  const SketchSpec sp{SketchKind::s_hashing, 12, 2, 91};
  const double r1 = failure_rate(sp, a, 0.5, 30);
  const double r2 = failure_rate(sp, a, 0.5, 30);
  EXPECT_EQ(r1, r2);
  EXPECT_THROW(failure_rate(sp, a, 0.5, 0), InvalidArgument);
}

TEST(CoherenceReduction, IdentityColumns) {
  DenseMat u(256, 4);
  for (std::size_t k = 0; k < 4; ++k) u(k, k) = 1.0;
  const auto rep = coherence_reduction_check(u, 0.1, 200, 92);
  EXPECT_GE(rep.frequency, 0.85);
  for (double mu : rep.mu) EXPECT_LT(mu, 1.0);
}

TEST(CoherenceReduction, SquareOrthogonalHoldsAlways) {
  const DenseMat q = orthonormal(16, 16, 93);
  const auto rep = coherence_reduction_check(q, 0.1, 50, 94);
  EXPECT_EQ(rep.frequency, 1.0);
}

TEST(CoherenceReduction, CoherentUReducedAtN1024) {
  DenseMat u(1024, 16);
  for (std::size_t k = 0; k < 16; ++k) u(k, k) = 1.0;
  const auto rep = coherence_reduction_check(u, 0.1, 200, 95);
  for (double mu : rep.mu) EXPECT_LT(mu, 1.0);
  EXPECT_THROW(coherence_reduction_check(DenseMat(12, 2), 0.1, 5, 0), InvalidArgument);
}
