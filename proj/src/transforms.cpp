#include "sketchls/transforms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sketchls/errors.hpp"

namespace sketchls {

bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht_inplace(std::span<double> x) {
  const std::size_t n = x.size();
  if (!is_pow2(n)) throw InvalidArgument("fwht: length " + std::to_string(n) + " is not a power of two");
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t base = 0; base < n; base += 2 * half) {
      for (std::size_t j = base; j < base + half; ++j) {
        const double a = x[j];
        const double b = x[j + half];
        x[j] = a + b;
        x[j + half] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : x) v *= scale;
}

std::vector<double> fwht(std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  fwht_inplace(y);
  return y;
}

DhtPlan::DhtPlan(std::size_t n) : n_(n) {
  if (!is_pow2(n)) throw InvalidArgument("DhtPlan: length " + std::to_string(n) + " is not a power of two");
  while ((std::size_t{1} << log2n_) < n) ++log2n_;
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n_; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n_ - 1 - b);
    bitrev_[i] = r;
  }
  cos_.resize(n / 2);
  sin_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cos_[k] = std::cos(angle);
    sin_[k] = std::sin(angle);
  }
}

void DhtPlan::apply(std::span<double> x, std::span<double> scratch) const {
  if (x.size() != n_) throw DimensionError("DhtPlan::apply: length mismatch");
  if (scratch.size() < 2 * n_) throw DimensionError("DhtPlan::apply: scratch too small");
  if (n_ == 1) return;
  double* re = scratch.data();
  double* im = scratch.data() + n_;
  for (std::size_t i = 0; i < n_; ++i) {
    re[bitrev_[i]] = x[i];
    im[bitrev_[i]] = 0.0;
  }
  // X_k = sum_j x_j exp(-2 pi i jk / n)
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t base = 0; base < n_; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const double wr = cos_[j * stride];
        const double wi = -sin_[j * stride];
        const std::size_t a = base + j;
        const std::size_t b = a + half;
        const double tr = re[b] * wr - im[b] * wi;
        const double ti = re[b] * wi + im[b] * wr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (std::size_t k = 0; k < n_; ++k) x[k] = (re[k] - im[k]) * scale;
}

void DhtPlan::apply(std::span<double> x) const {
  std::vector<double> scratch(2 * n_);
  apply(x, scratch);
}

std::vector<double> fdht(std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  DhtPlan(y.size()).apply(y);
  return y;
}

}  // namespace sketchls
