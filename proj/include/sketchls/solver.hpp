#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sketchls/linalg.hpp"
#include "sketchls/lsqr.hpp"
#include "sketchls/matrix.hpp"
#include "sketchls/sketch.hpp"

namespace sketchls {

/// Sketch-and-precondition configuration. sketch.m is ignored; the row count
/// is ceil(m_ratio * d). The sketch is drawn with seed
/// derive_seed(sketch.seed, "sketch").
struct SolverConfig {
  SketchSpec sketch;
  double m_ratio = 1.7;
  double tau_a = 1e-8;
  double tau_r = 1e-6;
  std::size_t it_max = 10000;
  double rcond = 1e-12;
  double rcond_thres = 1e-10;
  double perturb = 1e-10;
  bool min_norm = false;
  bool warm_start = false;

  /// HR-DHT, m = 1.7d, s = 1.
  static SolverConfig dense_defaults();
  /// s-hashing, m = 1.4d, s = 2.
  static SolverConfig sparse_defaults();
};

/// Throws InvalidArgument when a field is out of range.
void validate(const SolverConfig& cfg);
std::size_t sketch_rows(const SolverConfig& cfg, std::size_t d);

enum class Route { explicit_solution, iterative };
std::string_view to_string(Route r) noexcept;

struct StageTimes {
  double sketch = 0.0;
  double factorize = 0.0;
  double explicit_solve = 0.0;
  double lsqr = 0.0;
};

struct SolveResult {
  std::vector<double> x;
  double residual = 0.0;  // ||A x - b||_2, recomputed from x
  std::size_t iterations = 0;
  std::size_t rank = 0;
  Route route = Route::explicit_solution;
  bool converged = true;  // false when LSQR hit it_max
  bool perturbed = false;  // the r_ii + perturb safeguard was active
  StageTimes times;
};

/// Output of Steps 1-2: the realized sketch, Sb and the factorization of SA.
struct Preconditioner {
  SketchOp sketch;
  std::vector<double> sb;
  CpqrFactors factors;
  double perturb = 0.0;  // value actually used in R11 solves (0 or cfg.perturb)
};

/// Steps 1-2. Throws RankZeroError if the sketch of A is zero.
Preconditioner build_preconditioner(const Matrix& a, std::span<const double> b, const SolverConfig& cfg);

/// Q1^T S b, the warm start of Step 4.
std::vector<double> sketched_coordinates(const Preconditioner& pc);
/// Step 3: x_s = V1 R11^{-1} Q1^T S b.
std::vector<double> sketched_solution(const Preconditioner& pc);

/// V1 R11^{-1} y.
std::vector<double> recover(const CpqrFactors& f, std::span<const double> y, double perturb);

/// W y and W^T v for W = A V1 R11^{-1}; W is never formed.
std::vector<double> apply_W(const CpqrFactors& f, const Matrix& a, std::span<const double> y, double perturb);
std::vector<double> apply_Wt(const CpqrFactors& f, const Matrix& a, std::span<const double> v,
                             double perturb);

/// Step 4: LSQR on min ||W y - b||, returning y (not x).
LsqrResult lsqr_preconditioned(const Matrix& a, std::span<const double> b, const Preconditioner& pc,
                               double tau_r, std::size_t it_max, bool warm_start);

/// ||A x - b||_2 <= tau_a.
bool explicit_residual_check(const Matrix& a, std::span<const double> b, std::span<const double> x,
                             double tau_a);
double residual_norm(const Matrix& a, std::span<const double> b, std::span<const double> x);

SolveResult solve(const Matrix& a, std::span<const double> b, const SolverConfig& cfg);

}  // namespace sketchls
