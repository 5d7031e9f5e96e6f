#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sketchls/matrix.hpp"

namespace sketchls {

/// Compact SVD A = U diag(sigma) V^T truncated to the numerical rank.
struct SvdFactors {
  DenseMat u;                 // n x r, orthonormal columns
  std::vector<double> sigma;  // r values, positive and nonincreasing
  DenseMat v;                 // d x r, orthonormal columns
  std::size_t rank = 0;
};

/// One-sided Jacobi SVD (after a Householder QR when the matrix is tall).
/// Keeps the singular values greater than rank_tol * sigma_max.
/// Throws NonFiniteError on NaN/inf input and InvalidArgument for rank_tol < 0.
SvdFactors svd_compact(const DenseMat& a, double rank_tol);

/// All min(n, d) singular values in nonincreasing order, no vectors.
std::vector<double> singular_values(const DenseMat& a);

/// 2-norm condition number sigma_max / sigma_min over all min(n, d) values
/// (infinity when sigma_min is zero).
double condition_number(const DenseMat& a);

/// Householder QR of a tall matrix (rows >= cols).
struct ThinQr {
  DenseMat q;  // rows x cols, orthonormal columns
  DenseMat r;  // cols x cols, upper triangular
};
ThinQr thin_qr(const DenseMat& a);
/// Only the triangular factor of a tall matrix; cheaper than thin_qr.
DenseMat qr_r_factor(const DenseMat& a);

// =============================================================================
/// Rank-revealing factorization B * Vhat = Q * [R11 R12; 0 ~0] with
/// Vhat = P * Z, P the column permutation given by `perm` and Z an optional
/// orthogonal d x d rotation (present after complete_orthogonal).
struct CpqrFactors {
  DenseMat q1;                      // m x p
  DenseMat r11;                     // p x p, upper triangular, nonzero diagonal
  DenseMat r12;                     // p x (d - p)
  std::vector<std::size_t> perm;    // (B P)(:, k) = B(:, perm[k])
  std::optional<DenseMat> rotation;  // Z, d x d

  std::size_t rank() const noexcept { return r11.rows(); }
  std::size_t cols() const noexcept { return perm.size(); }
};

/// Column-pivoted Householder QR. The rank is the largest p with
/// |r_pp| >= rcond * |r_11|; diagonal entries of R11 are returned positive.
/// Throws RankZeroError for an all-zero B and InvalidArgument for rcond
/// outside (0, 1).
CpqrFactors cpqr(const DenseMat& b, double rcond);

/// Annihilates R12 with right orthogonal transformations (RZ factorization of
/// [R11 R12]); the product Q R Vhat^T is unchanged.
CpqrFactors complete_orthogonal(CpqrFactors f);

/// V1 * y for y of length p.
std::vector<double> apply_v1(const CpqrFactors& f, std::span<const double> y);
/// V1^T * x for x of length d.
std::vector<double> apply_v1t(const CpqrFactors& f, std::span<const double> x);
/// The d x d orthogonal matrix Vhat.
DenseMat materialize_vhat(const CpqrFactors& f);

/// Solves R y = v (or R^T y = v) for upper-triangular R. With perturb > 0,
/// every division by r_ii uses r_ii + perturb instead.
/// Throws SingularError on a zero divisor.
std::vector<double> tri_solve(const DenseMat& r, std::span<const double> v, bool transpose,
                              double perturb = 0.0);

/// max|r_ii| / min|r_ii|, a lower bound on the 2-norm condition number.
double tri_cond_estimate(const DenseMat& r);

}  // namespace sketchls
