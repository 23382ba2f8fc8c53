#include <benchmark/benchmark.h>

#include "qxval/noise.h"

namespace {

void BM_MatrixPower(benchmark::State& state) {
  const auto q = qxval::TransitionMatrix::depolarizing(0.1, 1e-6);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto qn = q.power(n);
    benchmark::DoNotOptimize(qn.at(0, 0));
  }
}
BENCHMARK(BM_MatrixPower)->Arg(1000)->Arg(1'000'000);

void BM_ClosedFormQ00(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(qxval::depolarizing_q00(0.1, 1'000'000));
  }
}
BENCHMARK(BM_ClosedFormQ00);

void BM_EvolveErrorVector(benchmark::State& state) {
  const auto q = qxval::TransitionMatrix::depolarizing(0.05, 1e-6);
  const auto pi = qxval::ErrorVector::pristine();
  for (auto _ : state) {
    auto out = qxval::evolve_error_vector(pi, q, 2.5e-3);
    benchmark::DoNotOptimize(out.p[0]);
  }
}
BENCHMARK(BM_EvolveErrorVector);

}  // namespace

BENCHMARK_MAIN();
