#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sketchls {

bool is_pow2(std::size_t n) noexcept;
/// Smallest power of two >= n (1 for n = 0).
std::size_t next_pow2(std::size_t n) noexcept;

/// In-place normalized Walsh-Hadamard transform, H_ij = n^{-1/2} (-1)^{<i,j>}
/// with <i,j> the parity of the bitwise AND. Throws InvalidArgument unless the
/// length is a power of two.
void fwht_inplace(std::span<double> x);
std::vector<double> fwht(std::span<const double> x);

// =============================================================================
/// Precomputed tables for the normalized discrete Hartley transform
/// F_ij = n^{-1/2} (cos(2 pi ij / n) + sin(2 pi ij / n)) of one power-of-two
/// length, evaluated as Re(X) - Im(X) of a radix-2 complex FFT X of the input.
/// apply() is const and reentrant given a caller-owned scratch buffer.
class DhtPlan {
 public:
  explicit DhtPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  /// Scratch must hold at least 2n doubles.
  void apply(std::span<double> x, std::span<double> scratch) const;
  void apply(std::span<double> x) const;

 private:
  std::size_t n_;
  std::size_t log2n_ = 0;
  std::vector<std::size_t> bitrev_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

std::vector<double> fdht(std::span<const double> x);

}  // namespace sketchls
