#include <benchmark/benchmark.h>

#include "qxval/linkgen.h"
#include "qxval/rng.h"

namespace {

qxval::Config canonical(int n_mem, std::int64_t n_bell) {
  qxval::Config cfg;
  cfg.hardware.n_memories = n_mem;
  cfg.request.n_bell = n_bell;
  return *qxval::validate_config(cfg).config;
}

void BM_RoundTrainLink(benchmark::State& state) {
  const auto cfg = canonical(static_cast<int>(state.range(0)), 1000);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    qxval::Rng rng(seed++);
    auto report = qxval::run_quisp_link(cfg, rng);
    benchmark::DoNotOptimize(report.completion_s);
  }
}
BENCHMARK(BM_RoundTrainLink)->Arg(1)->Arg(4)->Arg(16);

void BM_PerPairHandshakeLink(benchmark::State& state) {
  const auto cfg = canonical(static_cast<int>(state.range(0)), 1000);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    qxval::Rng rng(seed++);
    auto report = qxval::run_sequence_link(cfg, rng);
    benchmark::DoNotOptimize(report.completion_s);
  }
}
BENCHMARK(BM_PerPairHandshakeLink)->Arg(1)->Arg(4)->Arg(16);

void BM_SinglePairLink(benchmark::State& state) {
  // The experiment-3 inner loop: one pair per link simulation.
  const auto cfg = canonical(1, 1);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    qxval::Rng rng(seed++);
    auto report = qxval::run_quisp_link(cfg, rng);
    benchmark::DoNotOptimize(report.completion_s);
  }
}
BENCHMARK(BM_SinglePairLink);

}  // namespace

BENCHMARK_MAIN();
