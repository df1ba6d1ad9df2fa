#include <doctest.h>

#include <chrono>
#include <random>

#include "lmsbn/bench.hpp"
#include "lmsbn/ordering.hpp"
#include "lmsbn/synth.hpp"

using namespace lmsbn;

// Same shape as the scene benchmark: 6 labels, 294 inputs, 1211 training and
// 1196 test instances, sampled from a planted network whose labels depend
// on each other strongly and on the inputs weakly.
TEST_CASE("scene-shaped planted data") {
  const int k = 6;
  const int d = 294;
  const GraphSpec g = full_graph(GraphKind::directed, k, d, {3, 1, 5, 0, 2, 4});
  WeightVector planted{std::vector<double>(g.num_cliques())};
  std::mt19937_64 rng(91);
  std::normal_distribution<double> normal;
  for (std::size_t j = 0; j < g.num_cliques(); ++j) {
    const Clique& c = g.cliques()[j];
    if (c.outputs.size() > 1) {
      planted.w[j] = 1.5 * normal(rng);
    } else if (c.input) {
      planted.w[j] = 0.15 * normal(rng);
    } else {
      planted.w[j] = 0.5 * normal(rng);
    }
  }
  const Dataset train = sample_sbn(SynthConfig{92, 1211, g, planted});
  const Dataset test = sample_sbn(SynthConfig{93, 1196, g, planted});

  TrainConfig config;
  config.lambda = 1.0 / static_cast<double>(train.size());
  const auto start = std::chrono::steady_clock::now();
  const ComparisonReport r = compare_with_independent(train, test, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  MESSAGE("independent E=" << r.independent.exact_match << " Fsam=" << r.independent.f_sample);
  MESSAGE("index order E=" << r.lmsbn_index.exact_match << " Fsam=" << r.lmsbn_index.f_sample);
  MESSAGE("fscore order E=" << r.lmsbn_fscore.exact_match << " Fsam=" << r.lmsbn_fscore.f_sample);
  MESSAGE("seconds " << seconds);

  CHECK(r.fscore_order.size() == 6);
  CHECK(r.lmsbn_fscore.exact_match > r.independent.exact_match);
  CHECK(seconds < 600.0);
}
