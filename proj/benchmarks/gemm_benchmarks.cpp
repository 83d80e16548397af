// Square f64 matrix products: textbook i-j-k against the contiguous and
// blocked kernels.

#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "moa/kernels.hpp"

namespace {

struct Operands {
  std::vector<double> a, b, c;

  explicit Operands(std::int64_t n) : a(n * n), b(n * n), c(n * n) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);
  }
};

template <typename Kernel>
void run(benchmark::State& state, Kernel kernel) {
  const auto n = state.range(0);
  Operands ops(n);
  const moa::kernels::GemmDims dims{n, n, n};
  for (auto _ : state) {
    state.PauseTiming();
    std::fill(ops.c.begin(), ops.c.end(), 0.0);
    state.ResumeTiming();
    kernel(ops, dims);
    benchmark::DoNotOptimize(ops.c.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void BM_Naive(benchmark::State& state) {
  run(state, [](Operands& o, const moa::kernels::GemmDims& d) {
    moa::kernels::naive<double>(o.a, o.b, o.c, d);
  });
}

void BM_Contiguous(benchmark::State& state) {
  run(state, [](Operands& o, const moa::kernels::GemmDims& d) {
    moa::kernels::contiguous<double>(o.a, o.b, o.c, d);
  });
}

void BM_Blocked(benchmark::State& state) {
  const auto b = state.range(1);
  run(state, [b](Operands& o, const moa::kernels::GemmDims& d) {
    moa::kernels::blocked<double>(o.a, o.b, o.c, d, {b, b, b});
  });
}

}  // namespace

BENCHMARK(BM_Naive)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Contiguous)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Blocked)
    ->ArgsProduct({{128, 256, 512}, {16, 32, 64}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
