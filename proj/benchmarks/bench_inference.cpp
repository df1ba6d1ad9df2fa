#include <benchmark/benchmark.h>

#include "lmsbn/inference.hpp"
#include "lmsbn/ordering.hpp"
#include "lmsbn/synth.hpp"
#include "lmsbn/training.hpp"

namespace {

using namespace lmsbn;

struct Setup {
  GraphSpec graph;
  WeightVector weights;
  Dataset test;
};

// Planted full directed model, trained on its own samples when `trained`.
Setup make_setup(int k, bool trained) {
  GraphSpec g = full_graph(GraphKind::directed, k, 5, index_order(k));
  const WeightVector planted = random_weights(g, 1.0, 7 + static_cast<std::uint64_t>(k));
  Dataset test = sample_sbn(SynthConfig{100 + static_cast<std::uint64_t>(k), 64, g, planted});
  WeightVector w = random_weights(g, 0.1, 200 + static_cast<std::uint64_t>(k));
  if (trained) {
    const Dataset train = sample_sbn(SynthConfig{300 + static_cast<std::uint64_t>(k), 500, g, planted});
    TrainConfig config;
    config.lambda = 1.0 / 500.0;
    w = train_lmsbn(train, g, config).weights;
  }
  return {std::move(g), std::move(w), std::move(test)};
}

void run_bb(benchmark::State& state, bool trained) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), trained);
  std::size_t l = 0;
  std::uint64_t visited = 0;
  for (auto _ : state) {
    const InferenceResult r = bb_infer(s.graph, s.weights, s.test.instances[l].x, BBConfig{});
    visited += r.states_visited;
    benchmark::DoNotOptimize(r.objective);
    l = (l + 1) % s.test.size();
  }
  state.counters["states"] = benchmark::Counter(static_cast<double>(visited), benchmark::Counter::kAvgIterations);
}

void BM_BranchAndBoundTrained(benchmark::State& state) { run_bb(state, true); }
void BM_BranchAndBoundRandom(benchmark::State& state) { run_bb(state, false); }

void BM_Exhaustive(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), true);
  std::size_t l = 0;
  for (auto _ : state) {
    const InferenceResult r = exhaustive_infer(s.graph, s.weights, s.test.instances[l].x);
    benchmark::DoNotOptimize(r.objective);
    l = (l + 1) % s.test.size();
  }
}

}  // namespace

BENCHMARK(BM_BranchAndBoundTrained)->DenseRange(5, 20, 5);
BENCHMARK(BM_BranchAndBoundRandom)->DenseRange(5, 20, 5);
BENCHMARK(BM_Exhaustive)->DenseRange(5, 20, 5)->Unit(benchmark::kMillisecond);
