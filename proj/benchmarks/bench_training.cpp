#include <benchmark/benchmark.h>

#include "lmsbn/ordering.hpp"
#include "lmsbn/synth.hpp"
#include "lmsbn/training.hpp"

namespace {

using namespace lmsbn;

void BM_TrainLmsbn(benchmark::State& state) {
  const int k = 6;
  const auto n = static_cast<std::size_t>(state.range(0));
  const GraphSpec g = full_graph(GraphKind::directed, k, 20, index_order(k));
  const Dataset data = sample_sbn(SynthConfig{11, n, g, random_weights(g, 0.5, 12)});
  TrainConfig config;
  config.lambda = 1.0 / static_cast<double>(n);
  for (auto _ : state) benchmark::DoNotOptimize(train_lmsbn(data, g, config).gap());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_TrainLmbm(benchmark::State& state) {
  const int k = 6;
  const auto n = static_cast<std::size_t>(state.range(0));
  const GraphSpec g = full_graph(GraphKind::undirected, k, 20, index_order(k));
  const Dataset data = sample_bm(SynthConfig{13, n, g, random_weights(g, 0.5, 14)});
  TrainConfig config;
  config.lambda = 1.0 / static_cast<double>(n);
  config.eta0 = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(train_lmbm(data, g, config).gap());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_TrainLmsbn)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainLmbm)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
