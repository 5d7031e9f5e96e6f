#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sketchls/matrix.hpp"

namespace sketchls {

enum class Family {
  incoherent_dense,
  semicoherent_dense,
  coherent_dense,
  incoherent_sparse,
  semicoherent_sparse,
  coherent_sparse,
  identity_block,
  from_file,
};

std::string_view to_string(Family f) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

struct ProblemSpec {
  Family family = Family::incoherent_dense;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t r = 0;  // identity_block only
  std::uint64_t seed = 0;
  std::string path;   // from_file only
};

/// U diag(1, ..., 1e6 equally spaced) V^T with U, V from Householder QR of
/// Gaussian matrices.
DenseMat gen_incoherent_dense(std::size_t n, std::size_t d, std::uint64_t seed);
/// [B 0; 0 I_{d/2}] + 1e-8 J with B = gen_incoherent_dense(n - d/2, d/2). d even.
DenseMat gen_semicoherent_dense(std::size_t n, std::size_t d, std::uint64_t seed);
/// [I_d; 0] + 1e-8 J. Does not depend on the seed.
DenseMat gen_coherent_dense(std::size_t n, std::size_t d);

/// Each entry present with probability 0.01 with an N(0, 1) value, then
/// column j scaled by 10^(-6 j / (d - 1)). Needs n >= 100.
SparseMat gen_incoherent_sparse(std::size_t n, std::size_t d, std::uint64_t seed);
/// D^5 B and D^20 B for B an incoherent sparse draw and D diagonal with N(0, 1)
/// entries raised to the literal power (even powers drop the sign).
SparseMat gen_semicoherent_sparse(std::size_t n, std::size_t d, std::uint64_t seed);
SparseMat gen_coherent_sparse(std::size_t n, std::size_t d, std::uint64_t seed);

/// [I_r 0; 0 0], n x d.
DenseMat gen_identity_block(std::size_t n, std::size_t d, std::size_t r);

std::vector<double> rhs_ones(std::size_t n);

/// Builds the matrix described by spec; from_file reads spec.path.
Matrix generate(const ProblemSpec& spec);

}  // namespace sketchls
