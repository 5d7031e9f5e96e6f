#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sketchls/matrix.hpp"

namespace sketchls {

enum class SketchKind { s_hashing, s_hashing_variant, gaussian, sampling, hr_dht, sr_dht, hrht };

std::string_view to_string(SketchKind kind) noexcept;
std::optional<SketchKind> parse_sketch_kind(std::string_view name) noexcept;
/// True for kinds whose construction reads SketchSpec::s.
bool uses_hashing(SketchKind kind) noexcept;

/// A sketch distribution: kind, output rows m, nonzeros per column s (hashing
/// kinds only) and the seed every random choice is derived from.
struct SketchSpec {
  SketchKind kind = SketchKind::s_hashing;
  std::size_t m = 1;
  std::size_t s = 1;
  std::uint64_t seed = 0;
};

/// m x n sparse sketch stored by columns; rows are sorted within a column.
struct HashSketch {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<std::size_t> col_ptr{0};
  std::vector<std::uint32_t> rows;
  std::vector<double> vals;

  /// Number of distinct rows drawn for column j (cancelled entries included).
  std::size_t support(std::size_t j) const noexcept { return col_ptr[j + 1] - col_ptr[j]; }
};

/// Row selector: output row i is input row rows[i]. Unscaled.
struct SamplingSketch {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<std::size_t> rows;
};

struct GaussianSketch {
  DenseMat s;  // m x n, entries N(0, 1/m)
};

enum class Transform { walsh_hadamard, hartley };

/// downstream * T * D where D = diag(signs) acts on the first n entries, the
/// input is zero-padded to n_pad, and T is the orthonormal transform.
struct TransformSketch {
  std::size_t n = 0;
  std::size_t n_pad = 0;
  std::vector<double> signs;
  Transform transform = Transform::hartley;
  std::variant<HashSketch, SamplingSketch> downstream;
};

class SketchOp {
 public:
  using Variant = std::variant<HashSketch, GaussianSketch, SamplingSketch, TransformSketch>;

  explicit SketchOp(Variant op) : op_(std::move(op)) {}

  std::size_t rows() const noexcept;
  /// Input dimension n (before any padding).
  std::size_t cols() const noexcept;
  const Variant& get() const noexcept { return op_; }

 private:
  Variant op_;
};

// Generators. Each is a pure function of (spec, n). Hashing kinds throw
// InvalidArgument unless 1 <= s <= m.

HashSketch gen_s_hashing(const SketchSpec& spec, std::size_t n);
HashSketch gen_s_hashing_variant(const SketchSpec& spec, std::size_t n);
/// (1/sqrt(s)) * (S1 + ... + Ss) from s independent 1-hashing matrices.
HashSketch gen_variant_via_sum(const SketchSpec& spec, std::size_t n);
SamplingSketch gen_sampling(const SketchSpec& spec, std::size_t n);
DenseMat gen_gaussian(const SketchSpec& spec, std::size_t n);
/// hr_dht, sr_dht or hrht.
TransformSketch gen_transform(const SketchSpec& spec, std::size_t n);

SketchOp draw_sketch(const SketchSpec& spec, std::size_t n);

/// S * A as an m x d dense matrix. Throws DimensionError unless S has A.rows() columns.
DenseMat apply_sketch(const SketchOp& s, const DenseMat& a);
DenseMat apply_sketch(const SketchOp& s, const SparseMat& a);
DenseMat apply_sketch(const SketchOp& s, const Matrix& a);
std::vector<double> apply_sketch(const SketchOp& s, std::span<const double> b);

/// The explicit m x n matrix (S applied to the identity). Test-sized inputs only.
DenseMat materialize(const SketchOp& s);
DenseMat to_dense(const HashSketch& h);

namespace kernels::serial {
DenseMat hash_apply(const HashSketch& h, const DenseMat& a);
DenseMat hash_apply(const HashSketch& h, const SparseMat& a);
DenseMat transform_apply(const TransformSketch& t, const DenseMat& a);
}  // namespace kernels::serial

namespace kernels::omp {
DenseMat hash_apply(const HashSketch& h, const DenseMat& a);
/// `at` is the transpose of A (CSR of A^T); columns of A run in parallel.
DenseMat hash_apply_transposed(const HashSketch& h, const SparseMat& at);
DenseMat transform_apply(const TransformSketch& t, const DenseMat& a);
DenseMat transform_apply_transposed(const TransformSketch& t, const SparseMat& at);
}  // namespace kernels::omp

}  // namespace sketchls
