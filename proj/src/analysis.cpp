#include "sketchls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sketchls/errors.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/transforms.hpp"

namespace sketchls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double zero_threshold(std::size_t rows, std::size_t cols, double smax) {
  return static_cast<double>(std::max(rows, cols)) * kEps * smax;
}

// V1 as an explicit d x p matrix.
DenseMat v1_matrix(const CpqrFactors& f) {
  const std::size_t p = f.rank();
  DenseMat v1(f.cols(), p);
  std::vector<double> e(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    e[k] = 1.0;
    const auto col = apply_v1(f, e);
    std::copy(col.begin(), col.end(), v1.col(k).begin());
    e[k] = 0.0;
  }
  return v1;
}

}  // namespace

DenseMat range_basis(const DenseMat& a) {
  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * kEps;
  SvdFactors svd = svd_compact(a, tol);
  if (svd.rank == 0) throw RankZeroError("range_basis: matrix is zero");
  return std::move(svd.u);
}

DenseMat range_basis(const Matrix& a) {
  if (const auto* d = std::get_if<DenseMat>(&a)) return range_basis(*d);
  return range_basis(to_dense(a));
}

double coherence_of_basis(const DenseMat& u) noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.cols(); ++j) s += u(i, j) * u(i, j);
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

double coherence(const Matrix& a) { return coherence_of_basis(range_basis(a)); }

double non_uniformity(std::span<const double> x) {
  const double n2 = norm2(x);
  if (n2 == 0.0) throw InvalidArgument("non_uniformity: zero vector");
  return max_abs(x) / n2;
}

DistortionReport distortion_from_sketched_basis(const DenseMat& su) {
  DistortionReport rep;
  if (su.cols() == 0) throw RankZeroError("distortion: empty basis");
  std::vector<double> sv = singular_values(su);
  const double smax = sv.empty() ? 0.0 : sv.front();
  double smin = su.rows() < su.cols() || sv.empty() ? 0.0 : sv.back();
  if (smin <= zero_threshold(su.rows(), su.cols(), smax)) smin = 0.0;
  rep.sigma_max = smax;
  rep.sigma_min = smin;
  rep.epsilon = std::max(1.0 - smin * smin, smax * smax - 1.0);
  rep.rank_preserved = smin > 0.0;
  return rep;
}

DistortionReport embedding_distortion_basis(const SketchOp& s, const DenseMat& u) {
  return distortion_from_sketched_basis(apply_sketch(s, u));
}

DistortionReport embedding_distortion(const SketchOp& s, const Matrix& a) {
  return embedding_distortion_basis(s, range_basis(a));
}

DenseMat right_solve_upper(const DenseMat& x, const DenseMat& r) {
  const std::size_t p = r.rows();
  if (r.cols() != p || x.cols() != p) throw DimensionError("right_solve_upper: shape mismatch");
  // X R^{-1}: column k of the result depends on columns < k, so sweep columns
  // left to right like a forward substitution applied to all rows at once.
  DenseMat out = x;
  for (std::size_t k = 0; k < p; ++k) {
    const double rkk = r(k, k);
    if (rkk == 0.0) throw SingularError("right_solve_upper: zero diagonal");
    auto ok = out.col(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double rjk = r(j, k);
      if (rjk == 0.0) continue;
      const auto oj = out.col(j);
      for (std::size_t i = 0; i < out.rows(); ++i) ok[i] -= oj[i] * rjk;
    }
    for (double& v : ok) v /= rkk;
  }
  return out;
}

double precond_quality(const Matrix& a, const CpqrFactors& f) {
  const DenseMat av1 = multiply(to_dense(a), v1_matrix(f));
  return condition_number(right_solve_upper(av1, f.r11));
}

PreconditionerProbe::PreconditionerProbe(const Matrix& a) {
  const DenseMat dense = to_dense(a);
  if (dense.rows() < dense.cols()) throw DimensionError("PreconditionerProbe: need n >= d");
  r_ = qr_r_factor(dense);
}

double PreconditionerProbe::kappa(const CpqrFactors& f) const {
  if (f.cols() != r_.cols()) throw DimensionError("PreconditionerProbe: factor width mismatch");
  return condition_number(right_solve_upper(multiply(r_, v1_matrix(f)), f.r11));
}

FailureStats failure_stats_basis(const SketchSpec& spec, const DenseMat& u, double epsilon,
                                 std::size_t trials) {
  if (trials == 0) throw InvalidArgument("failure_stats: trials must be >= 1");
  FailureStats st;
  st.trials = trials;
  st.reports.resize(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t t = 0; t < trials; ++t) {
    SketchSpec trial = spec;
    trial.seed = derive_seed(spec.seed, "trial", t);
    st.reports[t] = embedding_distortion_basis(draw_sketch(trial, u.rows()), u);
  }
  for (const auto& r : st.reports) {
    if (!r.rank_preserved) ++st.rank_losses;
    if (!r.rank_preserved || r.epsilon > epsilon) ++st.failures;
  }
  return st;
}

FailureStats failure_stats(const SketchSpec& spec, const Matrix& a, double epsilon, std::size_t trials) {
  return failure_stats_basis(spec, range_basis(a), epsilon, trials);
}

double failure_rate(const SketchSpec& spec, const Matrix& a, double epsilon, std::size_t trials) {
  return failure_stats(spec, a, epsilon, trials).rate();
}

CoherenceReduction coherence_reduction_check(const DenseMat& u, double delta1, std::size_t trials,
                                             std::uint64_t seed) {
  const std::size_t n = u.rows();
  const std::size_t r = u.cols();
  if (!is_pow2(n)) throw InvalidArgument("coherence_reduction_check: n must be a power of two");
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw InvalidArgument("coherence_reduction_check: delta1 must be in (0, 1)");
  if (trials == 0) throw InvalidArgument("coherence_reduction_check: trials must be >= 1");
  const double nd = static_cast<double>(n);
  CoherenceReduction out;
  out.bound = std::sqrt(static_cast<double>(r) / nd) + std::sqrt(8.0 * std::log(nd / delta1) / nd);
  out.mu.resize(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream rs(derive_seed(seed, "trial", t), "diag", 0);
    std::vector<double> signs(n);
    for (double& s : signs) s = rs.sign();
    DenseMat hdu(n, r);
    for (std::size_t j = 0; j < r; ++j) {
      auto c = hdu.col(j);
      const auto uj = u.col(j);
      for (std::size_t i = 0; i < n; ++i) c[i] = signs[i] * uj[i];
      fwht_inplace(c);
    }
    out.mu[t] = coherence_of_basis(hdu);
  }
  const auto hits = std::count_if(out.mu.begin(), out.mu.end(), [&](double m) { return m <= out.bound; });
  out.frequency = static_cast<double>(hits) / static_cast<double>(trials);
  return out;
}

}  // namespace sketchls
