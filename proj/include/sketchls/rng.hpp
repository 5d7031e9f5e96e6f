#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace sketchls {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure: the output depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Stable 64-bit tag for a stage label.
std::uint64_t label_hash(std::string_view label) noexcept;

/// Seed for a named sub-stage, e.g. derive_seed(master, "sketch").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) noexcept;

// =============================================================================
/// Counter-based random stream. The key is the seed, the upper half of the
/// counter identifies the substream, and the lower half counts blocks, so a
/// substream can be opened anywhere without touching any other.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;
  RandomStream(std::uint64_t seed, std::string_view label, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound); bound > 0. Unbiased (Lemire's method).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// +1 or -1 with equal probability.
  double sign() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sketchls
