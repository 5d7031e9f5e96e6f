#include "sketchls/sketch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sketchls/errors.hpp"
#include "sketchls/kernels.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/transforms.hpp"

namespace sketchls {

namespace {

constexpr std::array<std::pair<SketchKind, std::string_view>, 7> kKindNames{{
    {SketchKind::s_hashing, "s_hashing"},
    {SketchKind::s_hashing_variant, "s_hashing_variant"},
    {SketchKind::gaussian, "gaussian"},
    {SketchKind::sampling, "sampling"},
    {SketchKind::hr_dht, "hr_dht"},
    {SketchKind::sr_dht, "sr_dht"},
    {SketchKind::hrht, "hrht"},
}};

void check_rows(const SketchSpec& spec) {
  if (spec.m < 1) throw InvalidArgument("sketch: m must be >= 1");
  if (spec.m > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("sketch: m exceeds 32-bit row indices");
}

void check_hashing(const SketchSpec& spec) {
  check_rows(spec);
  if (spec.s < 1 || spec.s > spec.m)
    throw InvalidArgument("sketch: need 1 <= s <= m (s=" + std::to_string(spec.s) +
                          ", m=" + std::to_string(spec.m) + ")");
}

// Appends one column given (row, value) draws; coincident rows are summed.
void push_column(HashSketch& h, std::vector<std::pair<std::uint32_t, double>>& draws) {
  std::stable_sort(draws.begin(), draws.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < draws.size(); ++k) {
    if (k > 0 && draws[k].first == draws[k - 1].first) {
      h.vals.back() += draws[k].second;
    } else {
      h.rows.push_back(draws[k].first);
      h.vals.push_back(draws[k].second);
    }
  }
  h.col_ptr.push_back(h.rows.size());
}

void check_apply(const SketchOp& s, std::size_t n) {
  if (s.cols() != n) {
    throw DimensionError("apply_sketch: sketch has " + std::to_string(s.cols()) +
                         " columns but the operand has " + std::to_string(n) + " rows");
  }
}

template <class Fn>
void for_each_transformed_column(const TransformSketch& t, std::size_t count, Fn&& load, DenseMat& out,
                                 bool parallel) {
  const std::optional<DhtPlan> plan =
      t.transform == Transform::hartley ? std::optional<DhtPlan>(DhtPlan(t.n_pad)) : std::nullopt;
  const auto body = [&](std::size_t k, std::vector<double>& buf, std::vector<double>& scratch) {
    std::fill(buf.begin(), buf.end(), 0.0);
    load(k, std::span<double>(buf.data(), t.n));
    for (std::size_t i = 0; i < t.n; ++i) buf[i] *= t.signs[i];
    if (plan)
      plan->apply(buf, scratch);
    else
      fwht_inplace(buf);
    auto o = out.col(k);
    if (const auto* h = std::get_if<HashSketch>(&t.downstream)) {
      for (std::size_t j = 0; j < t.n_pad; ++j) {
        const double v = buf[j];
        for (std::size_t e = h->col_ptr[j]; e < h->col_ptr[j + 1]; ++e) o[h->rows[e]] += h->vals[e] * v;
      }
    } else {
      const auto& smp = std::get<SamplingSketch>(t.downstream);
      for (std::size_t i = 0; i < smp.m; ++i) o[i] = buf[smp.rows[i]];
    }
  };
  if (parallel) {
#pragma omp parallel
    {
      std::vector<double> buf(t.n_pad);
      std::vector<double> scratch(2 * t.n_pad);
#pragma omp for schedule(static)
      for (std::size_t k = 0; k < count; ++k) body(k, buf, scratch);
    }
  } else {
    std::vector<double> buf(t.n_pad);
    std::vector<double> scratch(2 * t.n_pad);
    for (std::size_t k = 0; k < count; ++k) body(k, buf, scratch);
  }
}

std::size_t downstream_rows(const TransformSketch& t) {
  return std::visit([](const auto& d) { return d.m; }, t.downstream);
}

}  // namespace

std::string_view to_string(SketchKind kind) noexcept {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<SketchKind> parse_sketch_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

bool uses_hashing(SketchKind kind) noexcept {
  return kind == SketchKind::s_hashing || kind == SketchKind::s_hashing_variant ||
         kind == SketchKind::hr_dht || kind == SketchKind::hrht;
}

std::size_t SketchOp::rows() const noexcept {
  return std::visit(
      [](const auto& op) -> std::size_t {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, GaussianSketch>) {
          return op.s.rows();
        } else if constexpr (std::is_same_v<T, TransformSketch>) {
          return downstream_rows(op);
        } else {
          return op.m;
        }
      },
      op_);
}

std::size_t SketchOp::cols() const noexcept {
  return std::visit(
      [](const auto& op) -> std::size_t {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, GaussianSketch>) {
          return op.s.cols();
        } else {
          return op.n;
        }
      },
      op_);
}

HashSketch gen_s_hashing(const SketchSpec& spec, std::size_t n) {
  check_hashing(spec);
  HashSketch h;
  h.m = spec.m;
  h.n = n;
  h.rows.reserve(n * spec.s);
  h.vals.reserve(n * spec.s);
  const double value = 1.0 / std::sqrt(static_cast<double>(spec.s));
  const bool rejection = 2 * spec.s <= spec.m;
  std::vector<std::uint32_t> pool;
  std::vector<std::uint32_t> picked(spec.s);
  std::vector<std::pair<std::uint32_t, double>> draws(spec.s);
  for (std::size_t j = 0; j < n; ++j) {
    RandomStream rows(spec.seed, "hash-rows", j);
    RandomStream signs(spec.seed, "hash-signs", j);
    if (rejection) {
      for (std::size_t k = 0; k < spec.s; ++k) {
        std::uint32_t r;
        do {
          r = static_cast<std::uint32_t>(rows.below(spec.m));
        } while (std::find(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(k), r) !=
                 picked.begin() + static_cast<std::ptrdiff_t>(k));
        picked[k] = r;
      }
    } else {
      pool.resize(spec.m);
      std::iota(pool.begin(), pool.end(), 0u);
      for (std::size_t k = 0; k < spec.s; ++k) {
        const std::size_t pick = k + rows.below(spec.m - k);
        std::swap(pool[k], pool[pick]);
        picked[k] = pool[k];
      }
    }
    std::sort(picked.begin(), picked.end());
    for (std::size_t k = 0; k < spec.s; ++k) draws[k] = {picked[k], signs.sign() * value};
    push_column(h, draws);
  }
  return h;
}

HashSketch gen_s_hashing_variant(const SketchSpec& spec, std::size_t n) {
  check_hashing(spec);
  HashSketch h;
  h.m = spec.m;
  h.n = n;
  const double value = 1.0 / std::sqrt(static_cast<double>(spec.s));
  std::vector<std::pair<std::uint32_t, double>> draws(spec.s);
  for (std::size_t j = 0; j < n; ++j) {
    RandomStream rows(spec.seed, "hash-rows", j);
    RandomStream signs(spec.seed, "hash-signs", j);
    for (std::size_t k = 0; k < spec.s; ++k)
      draws[k] = {static_cast<std::uint32_t>(rows.below(spec.m)), signs.sign() * value};
    push_column(h, draws);
  }
  return h;
}

HashSketch gen_variant_via_sum(const SketchSpec& spec, std::size_t n) {
  check_hashing(spec);
  HashSketch h;
  h.m = spec.m;
  h.n = n;
  const double value = 1.0 / std::sqrt(static_cast<double>(spec.s));
  std::vector<std::uint64_t> term_seeds(spec.s);
  for (std::size_t k = 0; k < spec.s; ++k) term_seeds[k] = derive_seed(spec.seed, "sum-term", k);
  std::vector<std::pair<std::uint32_t, double>> draws(spec.s);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < spec.s; ++k) {
      // column j of the k-th independent 1-hashing matrix
      RandomStream rows(term_seeds[k], "hash-rows", j);
      RandomStream signs(term_seeds[k], "hash-signs", j);
      draws[k] = {static_cast<std::uint32_t>(rows.below(spec.m)), signs.sign() * value};
    }
    push_column(h, draws);
  }
  return h;
}

SamplingSketch gen_sampling(const SketchSpec& spec, std::size_t n) {
  check_rows(spec);
  if (n == 0) throw InvalidArgument("gen_sampling: n must be >= 1");
  SamplingSketch smp{spec.m, n, std::vector<std::size_t>(spec.m)};
  RandomStream rs(spec.seed, "sample", 0);
  for (auto& r : smp.rows) r = rs.below(n);
  return smp;
}

DenseMat gen_gaussian(const SketchSpec& spec, std::size_t n) {
  check_rows(spec);
  DenseMat s(spec.m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
  for (std::size_t j = 0; j < n; ++j) {
    RandomStream rs(spec.seed, "gauss", j);
    for (double& v : s.col(j)) v = rs.normal() * scale;
  }
  return s;
}

TransformSketch gen_transform(const SketchSpec& spec, std::size_t n) {
  if (n == 0) throw InvalidArgument("gen_transform: n must be >= 1");
  TransformSketch t;
  t.n = n;
  t.n_pad = next_pow2(n);
  t.signs.resize(n);
  RandomStream rs(spec.seed, "diag", 0);
  for (double& s : t.signs) s = rs.sign();
  SketchSpec down = spec;
  down.seed = derive_seed(spec.seed, "downstream");
  switch (spec.kind) {
    case SketchKind::hr_dht:
      t.transform = Transform::hartley;
      t.downstream = gen_s_hashing(down, t.n_pad);
      break;
    case SketchKind::hrht:
      t.transform = Transform::walsh_hadamard;
      t.downstream = gen_s_hashing(down, t.n_pad);
      break;
    case SketchKind::sr_dht:
      t.transform = Transform::hartley;
      t.downstream = gen_sampling(down, t.n_pad);
      break;
    default:
      throw InvalidArgument("gen_transform: not a transform sketch kind");
  }
  return t;
}

SketchOp draw_sketch(const SketchSpec& spec, std::size_t n) {
  switch (spec.kind) {
    case SketchKind::s_hashing:
      return SketchOp(gen_s_hashing(spec, n));
    case SketchKind::s_hashing_variant:
      return SketchOp(gen_s_hashing_variant(spec, n));
    case SketchKind::gaussian:
      return SketchOp(GaussianSketch{gen_gaussian(spec, n)});
    case SketchKind::sampling:
      return SketchOp(gen_sampling(spec, n));
    case SketchKind::hr_dht:
    case SketchKind::sr_dht:
    case SketchKind::hrht:
      return SketchOp(gen_transform(spec, n));
  }
  throw InvalidArgument("draw_sketch: unknown kind");
}

namespace kernels::serial {

DenseMat hash_apply(const HashSketch& h, const DenseMat& a) {
  DenseMat out(h.m, a.cols());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    auto o = out.col(k);
    const auto ak = a.col(k);
    for (std::size_t j = 0; j < h.n; ++j) {
      const double v = ak[j];
      for (std::size_t e = h.col_ptr[j]; e < h.col_ptr[j + 1]; ++e) o[h.rows[e]] += h.vals[e] * v;
    }
  }
  return out;
}

DenseMat hash_apply(const HashSketch& h, const SparseMat& a) {
  DenseMat out(h.m, a.cols());
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (std::size_t j = 0; j < a.rows(); ++j) {
    for (std::size_t q = ptr[j]; q < ptr[j + 1]; ++q) {
      auto o = out.col(idx[q]);
      for (std::size_t e = h.col_ptr[j]; e < h.col_ptr[j + 1]; ++e) o[h.rows[e]] += h.vals[e] * val[q];
    }
  }
  return out;
}

DenseMat transform_apply(const TransformSketch& t, const DenseMat& a) {
  DenseMat out(downstream_rows(t), a.cols());
  for_each_transformed_column(
      t, a.cols(),
      [&](std::size_t k, std::span<double> dst) { std::copy(a.col(k).begin(), a.col(k).end(), dst.begin()); },
      out, false);
  return out;
}

}  // namespace kernels::serial

namespace kernels::omp {

DenseMat hash_apply(const HashSketch& h, const DenseMat& a) {
  DenseMat out(h.m, a.cols());
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < a.cols(); ++k) {
    auto o = out.col(k);
    const auto ak = a.col(k);
    for (std::size_t j = 0; j < h.n; ++j) {
      const double v = ak[j];
      for (std::size_t e = h.col_ptr[j]; e < h.col_ptr[j + 1]; ++e) o[h.rows[e]] += h.vals[e] * v;
    }
  }
  return out;
}

DenseMat hash_apply_transposed(const HashSketch& h, const SparseMat& at) {
  DenseMat out(h.m, at.rows());
  const auto ptr = at.row_ptr();
  const auto idx = at.col_idx();
  const auto val = at.values();
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t k = 0; k < at.rows(); ++k) {
    auto o = out.col(k);
    for (std::size_t q = ptr[k]; q < ptr[k + 1]; ++q) {
      const std::size_t j = idx[q];
      for (std::size_t e = h.col_ptr[j]; e < h.col_ptr[j + 1]; ++e) o[h.rows[e]] += h.vals[e] * val[q];
    }
  }
  return out;
}

DenseMat transform_apply(const TransformSketch& t, const DenseMat& a) {
  DenseMat out(downstream_rows(t), a.cols());
  for_each_transformed_column(
      t, a.cols(),
      [&](std::size_t k, std::span<double> dst) { std::copy(a.col(k).begin(), a.col(k).end(), dst.begin()); },
      out, true);
  return out;
}

DenseMat transform_apply_transposed(const TransformSketch& t, const SparseMat& at) {
  DenseMat out(downstream_rows(t), at.rows());
  const auto ptr = at.row_ptr();
  const auto idx = at.col_idx();
  const auto val = at.values();
  for_each_transformed_column(
      t, at.rows(),
      [&](std::size_t k, std::span<double> dst) {
        for (std::size_t q = ptr[k]; q < ptr[k + 1]; ++q) dst[idx[q]] = val[q];
      },
      out, true);
  return out;
}

}  // namespace kernels::omp

DenseMat apply_sketch(const SketchOp& s, const DenseMat& a) {
  check_apply(s, a.rows());
  return std::visit(
      [&](const auto& op) -> DenseMat {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, HashSketch>) {
          return kernels::omp::hash_apply(op, a);
        } else if constexpr (std::is_same_v<T, GaussianSketch>) {
          return kernels::omp::gemm(op.s, a);
        } else if constexpr (std::is_same_v<T, SamplingSketch>) {
          DenseMat out(op.m, a.cols());
          for (std::size_t k = 0; k < a.cols(); ++k)
            for (std::size_t i = 0; i < op.m; ++i) out(i, k) = a(op.rows[i], k);
          return out;
        } else {
          return kernels::omp::transform_apply(op, a);
        }
      },
      s.get());
}

DenseMat apply_sketch(const SketchOp& s, const SparseMat& a) {
  check_apply(s, a.rows());
  return std::visit(
      [&](const auto& op) -> DenseMat {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, HashSketch>) {
          return kernels::omp::hash_apply_transposed(op, a.transposed());
        } else if constexpr (std::is_same_v<T, GaussianSketch>) {
          const SparseMat at = a.transposed();
          DenseMat out(op.s.rows(), a.cols());
          const auto ptr = at.row_ptr();
          const auto idx = at.col_idx();
          const auto val = at.values();
#pragma omp parallel for schedule(dynamic, 16)
          for (std::size_t k = 0; k < at.rows(); ++k) {
            auto o = out.col(k);
            for (std::size_t q = ptr[k]; q < ptr[k + 1]; ++q) {
              const auto sj = op.s.col(idx[q]);
              const double v = val[q];
              for (std::size_t i = 0; i < o.size(); ++i) o[i] += sj[i] * v;
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, SamplingSketch>) {
          DenseMat out(op.m, a.cols());
          const auto ptr = a.row_ptr();
          const auto idx = a.col_idx();
          const auto val = a.values();
          for (std::size_t i = 0; i < op.m; ++i)
            for (std::size_t q = ptr[op.rows[i]]; q < ptr[op.rows[i] + 1]; ++q) out(i, idx[q]) = val[q];
          return out;
        } else {
          return kernels::omp::transform_apply_transposed(op, a.transposed());
        }
      },
      s.get());
}

DenseMat apply_sketch(const SketchOp& s, const Matrix& a) {
  return std::visit([&](const auto& m) { return apply_sketch(s, m); }, a);
}

std::vector<double> apply_sketch(const SketchOp& s, std::span<const double> b) {
  DenseMat col(b.size(), 1, std::vector<double>(b.begin(), b.end()));
  DenseMat out = apply_sketch(s, col);
  return {out.data().begin(), out.data().end()};
}

DenseMat materialize(const SketchOp& s) { return apply_sketch(s, DenseMat::identity(s.cols())); }

DenseMat to_dense(const HashSketch& h) {
  DenseMat s(h.m, h.n);
  for (std::size_t j = 0; j < h.n; ++j)
    for (std::size_t e = h.col_ptr[j]; e < h.col_ptr[j + 1]; ++e) s(h.rows[e], j) = h.vals[e];
  return s;
}

}  // namespace sketchls
