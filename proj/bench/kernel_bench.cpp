// Serial reference vs OpenMP kernels on desk-scale inputs.

#include <benchmark/benchmark.h>

#include <vector>

#include "sketchls/kernels.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/testgen.hpp"

using namespace sketchls;

namespace {

DenseMat random_dense(std::size_t n, std::size_t d, std::uint64_t seed) {
  RandomStream rs(seed, 0);
  DenseMat a(n, d);
  for (double& v : a.data()) v = rs.normal();
  return a;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  RandomStream rs(seed, 1);
  std::vector<double> x(n);
  for (double& v : x) v = rs.normal();
  return x;
}

template <bool Omp>
void BM_gemv(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const DenseMat a = random_dense(n, n / 8, 1);
  const auto x = random_vec(n / 8, 2);
  std::vector<double> y(n);
  for (auto _ : st) {
    if constexpr (Omp) kernels::omp::gemv(a, x, y);
    else kernels::serial::gemv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Omp>
void BM_gemv_t(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const DenseMat a = random_dense(n, n / 8, 1);
  const auto x = random_vec(n, 2);
  std::vector<double> y(n / 8);
  for (auto _ : st) {
    if constexpr (Omp) kernels::omp::gemv_t(a, x, y);
    else kernels::serial::gemv_t(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Omp>
void BM_spmv(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const SparseMat a = gen_incoherent_sparse(n, n / 10, 3);
  const auto x = random_vec(n / 10, 4);
  std::vector<double> y(n);
  for (auto _ : st) {
    if constexpr (Omp) kernels::omp::spmv(a, x, y);
    else kernels::serial::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Omp>
void BM_gemm(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const DenseMat a = random_dense(n, n, 5), b = random_dense(n, n, 6);
  for (auto _ : st) {
    DenseMat c = Omp ? kernels::omp::gemm(a, b) : kernels::serial::gemm(a, b);
    benchmark::DoNotOptimize(c.data().data());
  }
}

template <bool Omp>
void BM_hash_apply(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const std::size_t d = 100;
  const DenseMat a = random_dense(n, d, 7);
  const HashSketch h = gen_s_hashing({SketchKind::s_hashing, 140, 2, 8}, n);
  for (auto _ : st) {
    DenseMat c = Omp ? kernels::omp::hash_apply(h, a) : kernels::serial::hash_apply(h, a);
    benchmark::DoNotOptimize(c.data().data());
  }
}

template <bool Omp>
void BM_transform_apply(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const std::size_t d = 100;
  const DenseMat a = random_dense(n, d, 9);
  const TransformSketch t = gen_transform({SketchKind::hr_dht, 170, 1, 10}, n);
  for (auto _ : st) {
    DenseMat c = Omp ? kernels::omp::transform_apply(t, a) : kernels::serial::transform_apply(t, a);
    benchmark::DoNotOptimize(c.data().data());
  }
}

}  // namespace

BENCHMARK(BM_gemv<false>)->Name("gemv/serial")->Arg(4096);
BENCHMARK(BM_gemv<true>)->Name("gemv/omp")->Arg(4096);
BENCHMARK(BM_gemv_t<false>)->Name("gemv_t/serial")->Arg(4096);
BENCHMARK(BM_gemv_t<true>)->Name("gemv_t/omp")->Arg(4096);
BENCHMARK(BM_spmv<false>)->Name("spmv/serial")->Arg(20000);
BENCHMARK(BM_spmv<true>)->Name("spmv/omp")->Arg(20000);
BENCHMARK(BM_gemm<false>)->Name("gemm/serial")->Arg(256);
BENCHMARK(BM_gemm<true>)->Name("gemm/omp")->Arg(256);
BENCHMARK(BM_hash_apply<false>)->Name("hash_apply/serial")->Arg(8192);
BENCHMARK(BM_hash_apply<true>)->Name("hash_apply/omp")->Arg(8192);
BENCHMARK(BM_transform_apply<false>)->Name("transform_apply/serial")->Arg(4096);
BENCHMARK(BM_transform_apply<true>)->Name("transform_apply/omp")->Arg(4096);

BENCHMARK_MAIN();
