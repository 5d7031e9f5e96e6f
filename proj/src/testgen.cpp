#include "sketchls/testgen.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "sketchls/errors.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/mtx.hpp"
#include "sketchls/rng.hpp"

namespace sketchls {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 8> kFamilyNames{{
    {Family::incoherent_dense, "incoherent_dense"},
    {Family::semicoherent_dense, "semicoherent_dense"},
    {Family::coherent_dense, "coherent_dense"},
    {Family::incoherent_sparse, "incoherent_sparse"},
    {Family::semicoherent_sparse, "semicoherent_sparse"},
    {Family::coherent_sparse, "coherent_sparse"},
    {Family::identity_block, "identity_block"},
    {Family::from_file, "from_file"},
}};

constexpr double kSparseDensity = 0.01;
constexpr double kJitter = 1e-8;

void check_tall(std::size_t n, std::size_t d, const char* who) {
  if (d == 0) throw InvalidArgument(std::string(who) + ": d must be >= 1");
  if (n < d) throw DimensionError(std::string(who) + ": need n >= d");
}

DenseMat gaussian_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  DenseMat g(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    RandomStream rs(seed, "col", j);
    for (double& v : g.col(j)) v = rs.normal();
  }
  ThinQr qr = thin_qr(g);
  // Fix the column signs so that R has a positive diagonal.
  for (std::size_t j = 0; j < cols; ++j)
    if (qr.r(j, j) < 0.0)
      for (double& v : qr.q.col(j)) v = -v;
  return std::move(qr.q);
}

SparseMat scaled_by_diagonal_power(std::size_t n, std::size_t d, std::uint64_t seed, int power) {
  const SparseMat b = gen_incoherent_sparse(n, d, derive_seed(seed, "base"));
  RandomStream rs(seed, "diag", 0);
  std::vector<double> factors(n);
  for (double& f : factors) f = std::pow(rs.normal(), power);
  return b.row_scaled(factors);
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  for (const auto& [k, name] : kFamilyNames)
    if (k == f) return name;
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  for (const auto& [k, n] : kFamilyNames)
    if (n == name) return k;
  return std::nullopt;
}

DenseMat gen_incoherent_dense(std::size_t n, std::size_t d, std::uint64_t seed) {
  check_tall(n, d, "gen_incoherent_dense");
  const DenseMat u = gaussian_orthonormal(n, d, derive_seed(seed, "left"));
  const DenseMat v = gaussian_orthonormal(d, d, derive_seed(seed, "right"));
  DenseMat us = u;
  for (std::size_t j = 0; j < d; ++j) {
    const double sigma = d == 1 ? 1.0 : 1.0 + (1e6 - 1.0) * static_cast<double>(j) / static_cast<double>(d - 1);
    for (double& x : us.col(j)) x *= sigma;
  }
  return multiply(us, v.transposed());
}

DenseMat gen_semicoherent_dense(std::size_t n, std::size_t d, std::uint64_t seed) {
  check_tall(n, d, "gen_semicoherent_dense");
  if (d % 2 != 0) throw InvalidArgument("gen_semicoherent_dense: d must be even");
  const std::size_t h = d / 2;
  const DenseMat b = gen_incoherent_dense(n - h, h, seed);
  DenseMat a(n, d);
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t i = 0; i < n - h; ++i) a(i, j) = b(i, j);
  for (std::size_t k = 0; k < h; ++k) a(n - h + k, h + k) = 1.0;
  for (double& x : a.data()) x += kJitter;
  return a;
}

DenseMat gen_coherent_dense(std::size_t n, std::size_t d) {
  check_tall(n, d, "gen_coherent_dense");
  DenseMat a(n, d);
  for (std::size_t k = 0; k < d; ++k) a(k, k) = 1.0;
  for (double& x : a.data()) x += kJitter;
  return a;
}

SparseMat gen_incoherent_sparse(std::size_t n, std::size_t d, std::uint64_t seed) {
  check_tall(n, d, "gen_incoherent_sparse");
  if (static_cast<double>(n) * kSparseDensity < 1.0)
    throw InvalidArgument("gen_incoherent_sparse: n * 0.01 < 1, too few nonzeros per column");
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(static_cast<double>(n) * static_cast<double>(d) * kSparseDensity * 1.2));
  for (std::size_t j = 0; j < d; ++j) {
    RandomStream pattern(seed, "pattern", j);
    RandomStream values(seed, "values", j);
    const double scale = d == 1 ? 1.0 : std::pow(10.0, -6.0 * static_cast<double>(j) / static_cast<double>(d - 1));
    for (std::size_t i = 0; i < n; ++i)
      if (pattern.uniform() < kSparseDensity) entries.push_back({i, j, values.normal() * scale});
  }
  return SparseMat::from_triplets(n, d, std::move(entries));
}

SparseMat gen_semicoherent_sparse(std::size_t n, std::size_t d, std::uint64_t seed) {
  return scaled_by_diagonal_power(n, d, seed, 5);
}

SparseMat gen_coherent_sparse(std::size_t n, std::size_t d, std::uint64_t seed) {
  return scaled_by_diagonal_power(n, d, seed, 20);
}

DenseMat gen_identity_block(std::size_t n, std::size_t d, std::size_t r) {
  check_tall(n, d, "gen_identity_block");
  if (r > d) throw InvalidArgument("gen_identity_block: need r <= d");
  DenseMat a(n, d);
  for (std::size_t k = 0; k < r; ++k) a(k, k) = 1.0;
  return a;
}

std::vector<double> rhs_ones(std::size_t n) {
  if (n == 0) throw InvalidArgument("rhs_ones: n must be >= 1");
  return std::vector<double>(n, 1.0);
}

Matrix generate(const ProblemSpec& spec) {
  switch (spec.family) {
    case Family::incoherent_dense:
      return gen_incoherent_dense(spec.n, spec.d, spec.seed);
    case Family::semicoherent_dense:
      return gen_semicoherent_dense(spec.n, spec.d, spec.seed);
    case Family::coherent_dense:
      return gen_coherent_dense(spec.n, spec.d);
    case Family::incoherent_sparse:
      return gen_incoherent_sparse(spec.n, spec.d, spec.seed);
    case Family::semicoherent_sparse:
      return gen_semicoherent_sparse(spec.n, spec.d, spec.seed);
    case Family::coherent_sparse:
      return gen_coherent_sparse(spec.n, spec.d, spec.seed);
    case Family::identity_block:
      return gen_identity_block(spec.n, spec.d, spec.r);
    case Family::from_file:
      return read_matrix_market(spec.path);
  }
  throw InvalidArgument("generate: unknown family");
}

}  // namespace sketchls
