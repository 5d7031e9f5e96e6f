#include "sketchls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sketchls/errors.hpp"

namespace sketchls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxJacobiSweeps = 80;

void require_finite(const DenseMat& a, const char* who) {
  if (!a.all_finite()) throw NonFiniteError(std::string(who) + ": non-finite entry");
}

// Turns x into [beta, v(1:)] where (I - tau v v^T) x = beta e1 and v(0) = 1.
double make_reflector(std::span<double> x) {
  const double xnorm = norm2(x.subspan(1));
  if (xnorm == 0.0) return 0.0;
  // Work on x / s so that alpha - beta neither underflows nor overflows.
  const double s = std::max(std::abs(x[0]), xnorm);
  const double alpha = x[0] / s;
  const double beta = -std::copysign(std::hypot(alpha, xnorm / s), alpha);
  const double scale = 1.0 / (alpha - beta);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = (x[i] / s) * scale;
  x[0] = beta * s;
  return (beta - alpha) / beta;
}

// c <- (I - tau v v^T) c, with v(0) = 1 implied and v(1:) = tail.
void apply_reflector(double tau, std::span<const double> tail, std::span<double> c) {
  if (tau == 0.0) return;
  double w = c[0];
  for (std::size_t i = 0; i < tail.size(); ++i) w += tail[i] * c[i + 1];
  w *= tau;
  c[0] -= w;
  for (std::size_t i = 0; i < tail.size(); ++i) c[i + 1] -= w * tail[i];
}

// In-place Householder QR of a (rows >= cols); reflector k lives below the
// diagonal of column k.
std::vector<double> householder_inplace(DenseMat& a) {
  const std::size_t n = a.rows();
  const std::size_t d = std::min(a.rows(), a.cols());
  std::vector<double> tau(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    auto ck = a.col(k).subspan(k);
    tau[k] = make_reflector(ck);
    const auto tail = std::span<const double>(ck).subspan(1);
    const double t = tau[k];
#pragma omp parallel for schedule(static)
    for (std::size_t j = k + 1; j < a.cols(); ++j) apply_reflector(t, tail, a.col(j).subspan(k, n - k));
  }
  return tau;
}

DenseMat upper_block(const DenseMat& a, std::size_t p, std::size_t first, std::size_t count) {
  DenseMat r(p, count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < p && i <= first + j; ++i) r(i, j) = a(i, first + j);
  return r;
}

// Q(:, 0:p) from reflectors 0..p-1 stored in a.
DenseMat form_q(const DenseMat& a, std::span<const double> tau, std::size_t p) {
  const std::size_t n = a.rows();
  DenseMat q(n, p);
  for (std::size_t j = 0; j < p; ++j) q(j, j) = 1.0;
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t kk = p; kk-- > 0;) {
      if (kk > j) continue;  // H_kk acts on rows >= kk; column j is zero there until kk <= j
      const auto tail = a.col(kk).subspan(kk + 1);
      apply_reflector(tau[kk], tail, q.col(j).subspan(kk));
    }
  }
  return q;
}

// One-sided Jacobi: orthogonalizes the columns of g; accumulates the
// rotations into v when given.
void jacobi_orthogonalize(DenseMat& g, DenseMat* v) {
  const std::size_t k = g.cols();
  const double tol = kEps * std::sqrt(static_cast<double>(std::max<std::size_t>(g.rows(), 1)));
  std::vector<double> sq(k);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    for (std::size_t j = 0; j < k; ++j) {
      const double nj = norm2(g.col(j));
      sq[j] = nj * nj;
    }
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double alpha = sq[i];
        const double beta = sq[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        auto gi = g.col(i);
        auto gj = g.col(j);
        const double gamma = dot(gi, gj);
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < gi.size(); ++r) {
          const double a = gi[r];
          const double b = gj[r];
          gi[r] = c * a - s * b;
          gj[r] = s * a + c * b;
        }
        const double ni = norm2(gi);
        const double nj = norm2(gj);
        sq[i] = ni * ni;
        sq[j] = nj * nj;
        if (v != nullptr) {
          auto vi = v->col(i);
          auto vj = v->col(j);
          for (std::size_t r = 0; r < vi.size(); ++r) {
            const double a = vi[r];
            const double b = vj[r];
            vi[r] = c * a - s * b;
            vj[r] = s * a + c * b;
          }
        }
      }
    }
    if (!rotated) return;
  }
}

std::vector<std::size_t> order_by_norm_desc(const DenseMat& g, std::vector<double>& norms) {
  norms.resize(g.cols());
  for (std::size_t j = 0; j < g.cols(); ++j) norms[j] = norm2(g.col(j));
  std::vector<std::size_t> order(g.cols());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  return order;
}

// SVD of a with rows >= cols.
SvdFactors svd_tall(const DenseMat& a, double rank_tol) {
  const std::size_t d = a.cols();
  DenseMat q;
  DenseMat g;
  const bool use_qr = a.rows() > d;
  if (use_qr) {
    ThinQr qr = thin_qr(a);
    q = std::move(qr.q);
    g = std::move(qr.r);
  } else {
    g = a;
  }
  DenseMat v = DenseMat::identity(d);
  jacobi_orthogonalize(g, &v);

  std::vector<double> norms;
  const auto order = order_by_norm_desc(g, norms);
  const double smax = d > 0 ? norms[order[0]] : 0.0;
  std::size_t r = 0;
  while (r < d && norms[order[r]] > 0.0 && norms[order[r]] > rank_tol * smax) ++r;

  SvdFactors out;
  out.rank = r;
  out.sigma.resize(r);
  DenseMat ug(g.rows(), r);
  out.v = DenseMat(d, r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = norms[j];
    const double inv = 1.0 / norms[j];
    for (std::size_t i = 0; i < g.rows(); ++i) ug(i, k) = g(i, j) * inv;
    for (std::size_t i = 0; i < d; ++i) out.v(i, k) = v(i, j);
  }
  out.u = use_qr ? multiply(q, ug) : std::move(ug);
  return out;
}

}  // namespace

ThinQr thin_qr(const DenseMat& a) {
  if (a.rows() < a.cols()) throw DimensionError("thin_qr: matrix must have rows >= cols");
  DenseMat work = a;
  const auto tau = householder_inplace(work);
  ThinQr out;
  out.r = upper_block(work, a.cols(), 0, a.cols());
  out.q = form_q(work, tau, a.cols());
  return out;
}

DenseMat qr_r_factor(const DenseMat& a) {
  if (a.rows() < a.cols()) throw DimensionError("qr_r_factor: matrix must have rows >= cols");
  DenseMat work = a;
  householder_inplace(work);
  return upper_block(work, a.cols(), 0, a.cols());
}

SvdFactors svd_compact(const DenseMat& a, double rank_tol) {
  require_finite(a, "svd_compact");
  if (!(rank_tol >= 0.0)) throw InvalidArgument("svd_compact: rank_tol must be >= 0");
  if (a.rows() >= a.cols()) return svd_tall(a, rank_tol);
  SvdFactors t = svd_tall(a.transposed(), rank_tol);
  std::swap(t.u, t.v);
  return t;
}

std::vector<double> singular_values(const DenseMat& a) {
  require_finite(a, "singular_values");
  const DenseMat& tall_src = a.rows() >= a.cols() ? a : a.transposed();
  DenseMat g = tall_src.rows() > tall_src.cols() ? qr_r_factor(tall_src) : tall_src;
  jacobi_orthogonalize(g, nullptr);
  std::vector<double> s(g.cols());
  for (std::size_t j = 0; j < g.cols(); ++j) s[j] = norm2(g.col(j));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double condition_number(const DenseMat& a) {
  const auto s = singular_values(a);
  if (s.empty() || s.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

CpqrFactors cpqr(const DenseMat& b, double rcond) {
  if (!(rcond > 0.0 && rcond < 1.0)) throw InvalidArgument("cpqr: rcond must lie in (0, 1)");
  require_finite(b, "cpqr");
  const std::size_t m = b.rows();
  const std::size_t d = b.cols();
  DenseMat a = b;
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  const std::size_t kmax = std::min(m, d);
  std::vector<double> tau(kmax, 0.0);
  std::vector<double> norms(d, 0.0);
  double r11 = 0.0;
  std::size_t p = 0;

  for (std::size_t k = 0; k < kmax; ++k) {
#pragma omp parallel for schedule(static)
    for (std::size_t j = k; j < d; ++j) norms[j] = norm2(a.col(j).subspan(k));
    std::size_t jmax = k;
    for (std::size_t j = k + 1; j < d; ++j)
      if (norms[j] > norms[jmax]) jmax = j;
    const double nmax = norms[jmax];
    if (k == 0) {
      if (nmax == 0.0) throw RankZeroError("cpqr: matrix is zero");
      r11 = nmax;
    } else if (nmax == 0.0 || nmax < rcond * r11) {
      break;
    }
    if (jmax != k) {
      auto ck = a.col(k);
      auto cj = a.col(jmax);
      std::swap_ranges(ck.begin(), ck.end(), cj.begin());
      std::swap(perm[k], perm[jmax]);
    }
    auto ck = a.col(k).subspan(k);
    tau[k] = make_reflector(ck);
    const auto tail = std::span<const double>(ck).subspan(1);
    const double t = tau[k];
#pragma omp parallel for schedule(static)
    for (std::size_t j = k + 1; j < d; ++j) apply_reflector(t, tail, a.col(j).subspan(k));
    p = k + 1;
  }

  CpqrFactors f;
  f.r11 = upper_block(a, p, 0, p);
  f.r12 = upper_block(a, p, p, d - p);
  f.q1 = form_q(a, tau, p);
  f.perm = std::move(perm);
  for (std::size_t k = 0; k < p; ++k) {
    if (f.r11(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < p; ++j) f.r11(k, j) = -f.r11(k, j);
    for (std::size_t j = 0; j < d - p; ++j) f.r12(k, j) = -f.r12(k, j);
    for (double& x : f.q1.col(k)) x = -x;
  }
  return f;
}

CpqrFactors complete_orthogonal(CpqrFactors f) {
  const std::size_t p = f.rank();
  const std::size_t d = f.cols();
  if (p == 0) throw RankZeroError("complete_orthogonal: rank is zero");
  const std::size_t extra = d - p;
  if (extra == 0 || max_abs(f.r12.data()) == 0.0) return f;

  // T = [R11 R12]; reflector k acts on columns {k} U {p, ..., d-1}.
  DenseMat t(p, d);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i <= j; ++i) t(i, j) = f.r11(i, j);
  for (std::size_t j = 0; j < extra; ++j)
    for (std::size_t i = 0; i < p; ++i) t(i, p + j) = f.r12(i, j);
  DenseMat z = DenseMat::identity(d);

  std::vector<double> x(extra + 1);
  std::vector<double> vtail(extra);
  auto reflect_row = [&](auto get, auto set, double tau_k) {
    double w = get(0);
    for (std::size_t l = 0; l < extra; ++l) w += get(l + 1) * vtail[l];
    w *= tau_k;
    set(0, get(0) - w);
    for (std::size_t l = 0; l < extra; ++l) set(l + 1, get(l + 1) - w * vtail[l]);
  };

  for (std::size_t k = p; k-- > 0;) {
    x[0] = t(k, k);
    for (std::size_t l = 0; l < extra; ++l) x[l + 1] = t(k, p + l);
    const double tau_k = make_reflector(x);
    if (tau_k == 0.0) continue;
    std::copy(x.begin() + 1, x.end(), vtail.begin());
    t(k, k) = x[0];
    for (std::size_t l = 0; l < extra; ++l) t(k, p + l) = 0.0;
    auto col_of = [&](std::size_t l) { return l == 0 ? k : p + l - 1; };
    for (std::size_t i = 0; i < k; ++i) {
      reflect_row([&](std::size_t l) { return t(i, col_of(l)); },
                  [&](std::size_t l, double val) { t(i, col_of(l)) = val; }, tau_k);
    }
    for (std::size_t i = 0; i < d; ++i) {
      reflect_row([&](std::size_t l) { return z(i, col_of(l)); },
                  [&](std::size_t l, double val) { z(i, col_of(l)) = val; }, tau_k);
    }
    if (t(k, k) < 0.0) {
      for (std::size_t i = 0; i <= k; ++i) t(i, k) = -t(i, k);
      for (std::size_t i = 0; i < d; ++i) z(i, k) = -z(i, k);
    }
  }

  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i <= j; ++i) f.r11(i, j) = t(i, j);
  f.r12 = DenseMat(p, extra);
  f.rotation = f.rotation ? multiply(*f.rotation, z) : std::move(z);
  return f;
}

std::vector<double> apply_v1(const CpqrFactors& f, std::span<const double> y) {
  const std::size_t p = f.rank();
  const std::size_t d = f.cols();
  if (y.size() != p) throw DimensionError("apply_v1: vector length must equal the rank");
  std::vector<double> z(d, 0.0);
  if (f.rotation) {
    const DenseMat& zm = *f.rotation;
    for (std::size_t j = 0; j < p; ++j) {
      const double yj = y[j];
      const auto c = zm.col(j);
      for (std::size_t i = 0; i < d; ++i) z[i] += c[i] * yj;
    }
  } else {
    std::copy(y.begin(), y.end(), z.begin());
  }
  std::vector<double> x(d);
  for (std::size_t i = 0; i < d; ++i) x[f.perm[i]] = z[i];
  return x;
}

std::vector<double> apply_v1t(const CpqrFactors& f, std::span<const double> x) {
  const std::size_t p = f.rank();
  const std::size_t d = f.cols();
  if (x.size() != d) throw DimensionError("apply_v1t: vector length must equal the column count");
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = x[f.perm[i]];
  std::vector<double> out(p);
  if (f.rotation) {
    for (std::size_t j = 0; j < p; ++j) out[j] = dot(f.rotation->col(j), w);
  } else {
    std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p), out.begin());
  }
  return out;
}

DenseMat materialize_vhat(const CpqrFactors& f) {
  const std::size_t d = f.cols();
  DenseMat v(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      v(f.perm[i], j) = f.rotation ? (*f.rotation)(i, j) : (i == j ? 1.0 : 0.0);
  return v;
}

std::vector<double> tri_solve(const DenseMat& r, std::span<const double> v, bool transpose,
                              double perturb) {
  const std::size_t p = r.rows();
  if (r.cols() != p) throw DimensionError("tri_solve: matrix must be square");
  if (v.size() != p) throw DimensionError("tri_solve: right-hand side length mismatch");
  if (!(perturb >= 0.0)) throw InvalidArgument("tri_solve: perturb must be >= 0");
  std::vector<double> y(v.begin(), v.end());
  auto divisor = [&](std::size_t i) {
    const double div = r(i, i) + perturb;
    if (div == 0.0) throw SingularError("tri_solve: zero diagonal at index " + std::to_string(i));
    return div;
  };
  if (!transpose) {
    for (std::size_t j = p; j-- > 0;) {
      y[j] /= divisor(j);
      const double yj = y[j];
      const auto c = r.col(j);
      for (std::size_t i = 0; i < j; ++i) y[i] -= c[i] * yj;
    }
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      const auto c = r.col(i);
      double s = y[i];
      for (std::size_t k = 0; k < i; ++k) s -= c[k] * y[k];
      y[i] = s / divisor(i);
    }
  }
  return y;
}

double tri_cond_estimate(const DenseMat& r) {
  const std::size_t p = std::min(r.rows(), r.cols());
  if (p == 0) throw InvalidArgument("tri_cond_estimate: empty matrix");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double a = std::abs(r(i, i));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace sketchls
