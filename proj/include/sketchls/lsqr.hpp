#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sketchls/errors.hpp"
#include "sketchls/matrix.hpp"

namespace sketchls {

enum class LsqrStop {
  zero_rhs,        // b - A x0 = 0 or A^T (b - A x0) = 0 at the start
  tolerance,       // ||A^T r|| / (||A|| ||r||) <= tau_r
  machine_precision,
  iteration_limit,
};

struct LsqrResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  LsqrStop stop = LsqrStop::iteration_limit;
  double anorm = 0.0;   // running Frobenius estimate of ||A||
  double rnorm = 0.0;   // estimate of ||b - A x||
  double arnorm = 0.0;  // estimate of ||A^T (b - A x)||

  bool converged() const noexcept { return stop != LsqrStop::iteration_limit; }
};

/// Paige-Saunders LSQR for min ||A x - b||_2 (no damping). `Op` provides
/// rows(), cols(), apply(x, y) for y = A x and apply_t(x, y) for y = A^T x.
/// Starting from x0 (empty for zero), it solves for the correction and stops
/// once ||A^T r|| / (||A|| ||r||) <= tau_r, when either test drops below
/// machine precision, or after it_max iterations.
template <class Op>
LsqrResult lsqr(const Op& op, std::span<const double> b, std::span<const double> x0, double tau_r,
                std::size_t it_max) {
  const std::size_t m = op.rows();
  const std::size_t n = op.cols();
  if (b.size() != m) throw DimensionError("lsqr: rhs length mismatch");
  if (!x0.empty() && x0.size() != n) throw DimensionError("lsqr: x0 length mismatch");
  if (!(tau_r > 0.0)) throw InvalidArgument("lsqr: tau_r must be positive");
  if (it_max == 0) throw InvalidArgument("lsqr: it_max must be >= 1");

  LsqrResult res;
  res.x.assign(n, 0.0);
  std::vector<double> u(b.begin(), b.end());
  std::vector<double> tmp_m(m);
  std::vector<double> tmp_n(n);
  if (!x0.empty()) {
    op.apply(x0, tmp_m);
    for (std::size_t i = 0; i < m; ++i) u[i] -= tmp_m[i];
  }

  const auto scale = [](std::vector<double>& v, double s) {
    for (double& e : v) e *= s;
  };

  double beta = norm2(u);
  const double bnorm = beta;
  std::vector<double> v(n, 0.0);
  double alpha = 0.0;
  if (beta > 0.0) {
    scale(u, 1.0 / beta);
    op.apply_t(u, v);
    alpha = norm2(v);
  }
  if (alpha > 0.0) scale(v, 1.0 / alpha);
  std::vector<double> w = v;

  double rhobar = alpha;
  double phibar = beta;
  double anorm2 = 0.0;
  res.rnorm = beta;
  res.arnorm = alpha * beta;

  if (res.arnorm == 0.0) {
    res.stop = LsqrStop::zero_rhs;
  } else {
    while (res.iterations < it_max) {
      ++res.iterations;
      // Bidiagonalization step.
      op.apply(v, tmp_m);
      for (std::size_t i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
      beta = norm2(u);
      if (beta > 0.0) {
        scale(u, 1.0 / beta);
        anorm2 += alpha * alpha + beta * beta;
        op.apply_t(u, tmp_n);
        for (std::size_t j = 0; j < n; ++j) v[j] = tmp_n[j] - beta * v[j];
        alpha = norm2(v);
        if (alpha > 0.0) scale(v, 1.0 / alpha);
      } else {
        anorm2 += alpha * alpha;
      }

      // Plane rotation eliminating beta.
      const double rho = std::hypot(rhobar, beta);
      const double c = rhobar / rho;
      const double s = beta / rho;
      const double theta = s * alpha;
      rhobar = -c * alpha;
      const double phi = c * phibar;
      phibar = s * phibar;
      const double tau = s * phi;

      const double t1 = phi / rho;
      const double t2 = -theta / rho;
      for (std::size_t j = 0; j < n; ++j) {
        res.x[j] += t1 * w[j];
        w[j] = v[j] + t2 * w[j];
      }

      res.anorm = std::sqrt(anorm2);
      res.rnorm = phibar;
      res.arnorm = alpha * std::abs(tau);

      if (res.rnorm == 0.0 || res.arnorm == 0.0) {
        res.stop = LsqrStop::machine_precision;
        break;
      }
      const double test1 = res.rnorm / bnorm;
      const double test2 = res.arnorm / (res.anorm * res.rnorm);
      if (test2 <= tau_r) {
        res.stop = LsqrStop::tolerance;
        break;
      }
      if (1.0 + test1 <= 1.0 || 1.0 + test2 <= 1.0) {
        res.stop = LsqrStop::machine_precision;
        break;
      }
    }
  }
  if (!x0.empty())
    for (std::size_t j = 0; j < n; ++j) res.x[j] += x0[j];
  return res;
}

}  // namespace sketchls
