#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchls/linalg.hpp"
#include "sketchls/matrix.hpp"
#include "sketchls/sketch.hpp"

namespace sketchls {

/// Extreme singular values of S*U for an orthonormal basis U of range(A),
/// and the distortion epsilon = max(1 - smin^2, smax^2 - 1).
struct DistortionReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double epsilon = 0.0;
  bool rank_preserved = false;  // sigma_min > 0
};

/// Orthonormal basis of range(A): the U factor of the compact SVD, with
/// singular values below max(n, d) * eps * sigma_max treated as zero.
/// Throws RankZeroError for a zero matrix.
DenseMat range_basis(const DenseMat& a);
DenseMat range_basis(const Matrix& a);

/// Largest row norm of U. Throws RankZeroError for a zero matrix.
double coherence(const Matrix& a);
double coherence_of_basis(const DenseMat& u) noexcept;

/// ||x||_inf / ||x||_2. Throws InvalidArgument for a zero vector.
double non_uniformity(std::span<const double> x);

/// Distortion read off the singular values of an already sketched basis SU
/// (m x r). Values below max(m, r) * eps * sigma_max count as zero; m < r
/// means rank loss.
DistortionReport distortion_from_sketched_basis(const DenseMat& su);

DistortionReport embedding_distortion(const SketchOp& s, const Matrix& a);
/// Same with U supplied directly (orthonormal columns assumed).
DistortionReport embedding_distortion_basis(const SketchOp& s, const DenseMat& u);

/// kappa_2(W) for W = A V1 R11^{-1}, W materialized and fed to the SVD.
/// Exact triangular solves (no perturbation); throws SingularError when
/// R11 has a zero diagonal.
double precond_quality(const Matrix& a, const CpqrFactors& f);

/// Caches the R factor of A so that kappa(A V1 R11^{-1}) can be computed as
/// kappa(R_A V1 R11^{-1}), a d x p problem, for many factorizations of
/// sketches of the same A. A = Q_A R_A with orthonormal Q_A, so the singular
/// values agree.
class PreconditionerProbe {
 public:
  explicit PreconditionerProbe(const Matrix& a);

  const DenseMat& r_factor() const noexcept { return r_; }
  double kappa(const CpqrFactors& f) const;

 private:
  DenseMat r_;
};

/// X * R^{-1} for upper-triangular R (row-wise transposed solves).
DenseMat right_solve_upper(const DenseMat& x, const DenseMat& r);

struct FailureStats {
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t rank_losses = 0;
  std::vector<DistortionReport> reports;  // one per trial, in trial order

  double rate() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(trials);
  }
};

/// Trial t draws the sketch with seed derive_seed(spec.seed, "trial", t). A
/// trial fails if rank is lost or the distortion exceeds epsilon. Trials run
/// in parallel; results do not depend on the thread count.
FailureStats failure_stats(const SketchSpec& spec, const Matrix& a, double epsilon, std::size_t trials);
FailureStats failure_stats_basis(const SketchSpec& spec, const DenseMat& u, double epsilon,
                                 std::size_t trials);
double failure_rate(const SketchSpec& spec, const Matrix& a, double epsilon, std::size_t trials);

struct CoherenceReduction {
  double bound = 0.0;       // sqrt(r/n) + sqrt(8 log(n/delta1) / n)
  double frequency = 0.0;   // fraction of trials with mu(HDU) <= bound
  std::vector<double> mu;   // mu(HDU) per trial
};

/// Draws `trials` random sign diagonals D (trial t from derive_seed(seed,
/// "trial", t)) and measures mu(HDU) with H the normalized Walsh-Hadamard
/// matrix. Throws InvalidArgument unless n = U.rows() is a power of two and
/// delta1 is in (0, 1).
CoherenceReduction coherence_reduction_check(const DenseMat& u, double delta1, std::size_t trials,
                                             std::uint64_t seed);

}  // namespace sketchls
