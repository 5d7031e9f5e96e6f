#include "sketchls/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "sketchls/errors.hpp"
#include "sketchls/kernels.hpp"
#include "sketchls/rng.hpp"

namespace sketchls {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class AOp>
class WOperator {
 public:
  WOperator(const AOp& a, const CpqrFactors& f, double perturb) : a_(a), f_(f), perturb_(perturb) {}

  std::size_t rows() const noexcept { return a_.matrix().rows(); }
  std::size_t cols() const noexcept { return f_.rank(); }

  void apply(std::span<const double> y, std::span<double> out) const {
    const auto z = recover(f_, y, perturb_);
    a_.apply(z, out);
  }
  void apply_t(std::span<const double> v, std::span<double> out) const {
    std::vector<double> atv(f_.cols());
    a_.apply_t(v, atv);
    const auto y = tri_solve(f_.r11, apply_v1t(f_, atv), true, perturb_);
    std::copy(y.begin(), y.end(), out.begin());
  }

 private:
  const AOp& a_;
  const CpqrFactors& f_;
  double perturb_;
};

template <class AOp>
LsqrResult run_lsqr(const AOp& aop, std::span<const double> b, const Preconditioner& pc, double tau_r,
                    std::size_t it_max, bool warm_start) {
  const WOperator<AOp> w(aop, pc.factors, pc.perturb);
  std::vector<double> y0;
  if (warm_start) y0 = sketched_coordinates(pc);
  return lsqr(w, b, y0, tau_r, it_max);
}

LsqrResult dispatch_lsqr(const Matrix& a, std::span<const double> b, const Preconditioner& pc, double tau_r,
                         std::size_t it_max, bool warm_start) {
  if (const auto* d = std::get_if<DenseMat>(&a)) return run_lsqr(DenseOperator(*d), b, pc, tau_r, it_max, warm_start);
  return run_lsqr(SparseOperator(std::get<SparseMat>(a)), b, pc, tau_r, it_max, warm_start);
}

void check_problem(const Matrix& a, std::span<const double> b) {
  const std::size_t n = rows_of(a);
  const std::size_t d = cols_of(a);
  if (n == 0 || d == 0) throw DimensionError("solve: empty matrix");
  if (n < d) throw DimensionError("solve: need n >= d (got " + std::to_string(n) + " x " + std::to_string(d) + ")");
  if (b.size() != n) throw DimensionError("solve: b has length " + std::to_string(b.size()) + ", expected " + std::to_string(n));
  for (double v : b)
    if (!std::isfinite(v)) throw NonFiniteError("solve: b has a non-finite entry");
  const bool finite = std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DenseMat>) {
          return m.all_finite();
        } else {
          for (double v : m.values())
            if (!std::isfinite(v)) return false;
          return true;
        }
      },
      a);
  if (!finite) throw NonFiniteError("solve: A has a non-finite entry");
}

Preconditioner build(const Matrix& a, std::span<const double> b, const SolverConfig& cfg, StageTimes* times) {
  auto t0 = Clock::now();
  SketchSpec spec = cfg.sketch;
  spec.m = sketch_rows(cfg, cols_of(a));
  spec.seed = derive_seed(cfg.sketch.seed, "sketch");
  SketchOp s = draw_sketch(spec, rows_of(a));
  const DenseMat sa = apply_sketch(s, a);
  std::vector<double> sb = apply_sketch(s, b);
  if (times) times->sketch = seconds_since(t0);

  t0 = Clock::now();
  CpqrFactors f = cpqr(sa, cfg.rcond);
  if (cfg.min_norm) f = complete_orthogonal(std::move(f));
  const double perturb = tri_cond_estimate(f.r11) >= 1.0 / cfg.rcond_thres ? cfg.perturb : 0.0;
  if (times) times->factorize = seconds_since(t0);
  return Preconditioner{std::move(s), std::move(sb), std::move(f), perturb};
}

}  // namespace

SolverConfig SolverConfig::dense_defaults() {
  SolverConfig cfg;
  cfg.sketch.kind = SketchKind::hr_dht;
  cfg.sketch.s = 1;
  cfg.m_ratio = 1.7;
  return cfg;
}

SolverConfig SolverConfig::sparse_defaults() {
  SolverConfig cfg;
  cfg.sketch.kind = SketchKind::s_hashing;
  cfg.sketch.s = 2;
  cfg.m_ratio = 1.4;
  return cfg;
}

void validate(const SolverConfig& cfg) {
  if (!(cfg.m_ratio >= 1.0)) throw InvalidArgument("solver: m_ratio must be >= 1");
  if (!(cfg.tau_a > 0.0)) throw InvalidArgument("solver: tau_a must be positive");
  if (!(cfg.tau_r > 0.0)) throw InvalidArgument("solver: tau_r must be positive");
  if (cfg.it_max < 1) throw InvalidArgument("solver: it_max must be >= 1");
  if (!(cfg.rcond > 0.0 && cfg.rcond < 1.0)) throw InvalidArgument("solver: rcond must be in (0, 1)");
  if (!(cfg.rcond_thres > 0.0)) throw InvalidArgument("solver: rcond_thres must be positive");
  if (!(cfg.perturb >= 0.0)) throw InvalidArgument("solver: perturb must be >= 0");
  if (uses_hashing(cfg.sketch.kind) && cfg.sketch.s < 1) throw InvalidArgument("solver: s must be >= 1");
}

std::size_t sketch_rows(const SolverConfig& cfg, std::size_t d) {
  // The small offset keeps products like 1.7 * 100 from rounding up to 171.
  return static_cast<std::size_t>(std::ceil(cfg.m_ratio * static_cast<double>(d) - 1e-9));
}

std::string_view to_string(Route r) noexcept {
  return r == Route::explicit_solution ? "explicit" : "iterative";
}

Preconditioner build_preconditioner(const Matrix& a, std::span<const double> b, const SolverConfig& cfg) {
  validate(cfg);
  return build(a, b, cfg, nullptr);
}

std::vector<double> sketched_coordinates(const Preconditioner& pc) {
  return matvec(pc.factors.q1, pc.sb, true);
}

std::vector<double> sketched_solution(const Preconditioner& pc) {
  return recover(pc.factors, sketched_coordinates(pc), pc.perturb);
}

std::vector<double> recover(const CpqrFactors& f, std::span<const double> y, double perturb) {
  return apply_v1(f, tri_solve(f.r11, y, false, perturb));
}

std::vector<double> apply_W(const CpqrFactors& f, const Matrix& a, std::span<const double> y, double perturb) {
  return matvec(a, recover(f, y, perturb));
}

std::vector<double> apply_Wt(const CpqrFactors& f, const Matrix& a, std::span<const double> v,
                             double perturb) {
  return tri_solve(f.r11, apply_v1t(f, matvec(a, v, true)), true, perturb);
}

LsqrResult lsqr_preconditioned(const Matrix& a, std::span<const double> b, const Preconditioner& pc,
                               double tau_r, std::size_t it_max, bool warm_start) {
  return dispatch_lsqr(a, b, pc, tau_r, it_max, warm_start);
}

double residual_norm(const Matrix& a, std::span<const double> b, std::span<const double> x) {
  auto r = matvec(a, x);
  if (r.size() != b.size()) throw DimensionError("residual_norm: b length mismatch");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r);
}

bool explicit_residual_check(const Matrix& a, std::span<const double> b, std::span<const double> x,
                             double tau_a) {
  return residual_norm(a, b, x) <= tau_a;
}

SolveResult solve(const Matrix& a, std::span<const double> b, const SolverConfig& cfg) {
  check_problem(a, b);
  validate(cfg);
  SolveResult res;

  const Preconditioner pc = build(a, b, cfg, &res.times);
  res.rank = pc.factors.rank();
  res.perturbed = pc.perturb > 0.0;

  auto t0 = Clock::now();
  res.x = sketched_solution(pc);
  res.residual = residual_norm(a, b, res.x);
  res.times.explicit_solve = seconds_since(t0);
  if (res.residual <= cfg.tau_a) {
    res.route = Route::explicit_solution;
    return res;
  }

  t0 = Clock::now();
  const LsqrResult ls = lsqr_preconditioned(a, b, pc, cfg.tau_r, cfg.it_max, cfg.warm_start);
  res.x = recover(pc.factors, ls.x, pc.perturb);
  res.residual = residual_norm(a, b, res.x);
  res.iterations = ls.iterations;
  res.converged = ls.converged();
  res.route = Route::iterative;
  res.times.lsqr = seconds_since(t0);
  return res;
}

}  // namespace sketchls
