#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "lmsbn/error.hpp"
#include "lmsbn/synth.hpp"
#include "lmsbn/training.hpp"
#include "oracles.hpp"

using namespace lmsbn;

namespace {

std::uint64_t encode(const Labels& y) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < y.size(); ++i) m |= std::uint64_t{y[i] == -1} << i;
  return m;
}

// Pearson statistic of the observed joint label counts against expected
// counts summed from the per-instance exact probabilities.
template <class LogProb>
double chi_square(const Dataset& data, LogProb log_prob) {
  const int k = data.num_outputs;
  std::vector<double> expected(std::size_t{1} << k, 0.0);
  std::vector<double> observed(expected.size(), 0.0);
  for (const Instance& in : data.instances) {
    observed[encode(in.y)] += 1.0;
    oracle::for_each_assignment(k, [&](const Labels& y) { expected[encode(y)] += std::exp(log_prob(in.x, y)); });
  }
  double stat = 0.0;
  for (std::size_t m = 0; m < expected.size(); ++m) {
    stat += (observed[m] - expected[m]) * (observed[m] - expected[m]) / expected[m];
  }
  return stat;
}

// Generous upper tail for a chi-square variable with df degrees of freedom.
double chi_square_limit(int df) { return df + 5.0 * std::sqrt(2.0 * df); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("zero weights give fair coins") {
  const GraphSpec g = full_graph(GraphKind::directed, 4, 2, {0, 1, 2, 3});
  const WeightVector zero{std::vector<double>(g.num_cliques(), 0.0)};
  const std::size_t n = 20000;
  const Dataset data = sample_sbn(SynthConfig{5, n, g, zero});
  REQUIRE(data.size() == n);
  CHECK(data.num_outputs == 4);
  CHECK(data.input_dim == 2);
  const double sd = std::sqrt(0.25 / static_cast<double>(n));
  for (int i = 0; i < 4; ++i) {
    double pos = 0;
    for (const Instance& in : data.instances) pos += in.y[static_cast<std::size_t>(i)] == 1;
    CHECK(std::abs(pos / static_cast<double>(n) - 0.5) < 4 * sd);
  }

  const GraphSpec ug = full_graph(GraphKind::undirected, 3, 0, {0, 1, 2});
  const Dataset bm = sample_bm(SynthConfig{6, 16000, ug, WeightVector{std::vector<double>(ug.num_cliques(), 0.0)}});
  std::map<std::uint64_t, double> counts;
  for (const Instance& in : bm.instances) {
    CHECK(in.x.empty());
    counts[encode(in.y)] += 1.0;
  }
  CHECK(counts.size() == 8);
  double stat = 0.0;
  for (const auto& [m, c] : counts) stat += (c - 2000.0) * (c - 2000.0) / 2000.0;
  CHECK(stat < chi_square_limit(7));
}

TEST_CASE("single biased node") {
  const GraphSpec g(GraphKind::directed, 1, 0, {0}, {{{0}, std::nullopt}});
  const std::size_t n = 10000;
  const Dataset data = sample_sbn(SynthConfig{7, n, g, WeightVector{{3.0}}});
  double pos = 0;
  for (const Instance& in : data.instances) pos += in.y[0] == 1;
  const double p = sigmoid(3.0);
  CHECK(p == doctest::Approx(0.9526).epsilon(1e-4));
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
  MESSAGE("empirical " << pos / static_cast<double>(n) << " expected " << p << " sd " << sd);
  CHECK(std::abs(pos / static_cast<double>(n) - p) < 3 * sd);
}

TEST_CASE("sigmoid belief network goodness of fit") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 4; ++trial) {
    const int k = 2 + trial % 3;
    const int d = trial % 2 ? 2 : 0;
    const GraphSpec g = oracle::random_graph(GraphKind::directed, k, d, rng);
    const WeightVector w{oracle::normal_vector(g.num_cliques(), rng)};
    const Dataset data = sample_sbn(SynthConfig{100 + static_cast<std::uint64_t>(trial), 8000, g, w});
    const double stat = chi_square(data, [&](const std::vector<double>& x, const Labels& y) {
      return oracle::sbn_log_likelihood(g, w.w, x, y);
    });
    const int df = (1 << k) - 1;
    MESSAGE("K=" << k << " D=" << d << " chi2=" << stat << " df=" << df);
    CHECK(stat < chi_square_limit(df));
  }
}

TEST_CASE("Boltzmann machine sampling") {
  const GraphSpec edge(GraphKind::undirected, 2, 0, {0, 1}, {{{0, 1}, std::nullopt}});
  const std::size_t n = 20000;
  const Dataset data = sample_bm(SynthConfig{8, n, edge, WeightVector{{1.0}}});
  double agree = 0;
  for (const Instance& in : data.instances) agree += in.y[0] == in.y[1];
  const double p = std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0));
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
  CHECK(std::abs(agree / static_cast<double>(n) - p) < 4 * sd);

  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 4; ++trial) {
    const int k = 2 + trial % 3;
    const int d = trial % 2 ? 2 : 0;
    const GraphSpec g = oracle::random_graph(GraphKind::undirected, k, d, rng);
    const WeightVector w{oracle::normal_vector(g.num_cliques(), rng, 0.7)};
    const Dataset bm = sample_bm(SynthConfig{200 + static_cast<std::uint64_t>(trial), 8000, g, w});
    const double stat = chi_square(bm, [&](const std::vector<double>& x, const Labels& y) {
      return oracle::bm_log_likelihood(g, w.w, x, y);
    });
    const int df = (1 << k) - 1;
    MESSAGE("K=" << k << " D=" << d << " chi2=" << stat << " df=" << df);
    CHECK(stat < chi_square_limit(df));
  }
}

TEST_CASE("seeds and errors") {
  const GraphSpec g = full_graph(GraphKind::directed, 3, 2, {2, 0, 1});
  const WeightVector w = random_weights(g, 1.0, 9);
  CHECK(w.w.size() == g.num_cliques());
  CHECK(random_weights(g, 1.0, 9) == w);
  CHECK_FALSE(random_weights(g, 1.0, 10) == w);

  const Dataset a = sample_sbn(SynthConfig{11, 50, g, w});
  const Dataset b = sample_sbn(SynthConfig{11, 50, g, w});
  const Dataset c = sample_sbn(SynthConfig{12, 50, g, w});
  bool same = true, differs = false;
  for (std::size_t l = 0; l < 50; ++l) {
    same = same && a.instances[l].x == b.instances[l].x && a.instances[l].y == b.instances[l].y;
    differs = differs || a.instances[l].x != c.instances[l].x;
  }
  CHECK(same);
  CHECK(differs);

  const GraphSpec ug = full_graph(GraphKind::undirected, 3, 2, {0, 1, 2});
  CHECK_THROWS_AS(sample_sbn(SynthConfig{1, 10, ug, WeightVector{std::vector<double>(ug.num_cliques(), 0.0)}}),
                  PreconditionError);
  CHECK_THROWS_AS(sample_bm(SynthConfig{1, 10, g, w}), PreconditionError);
  const GraphSpec big = independent_graph(GraphKind::undirected, 21, 0);
  CHECK_THROWS_AS(sample_bm(SynthConfig{1, 10, big, WeightVector{std::vector<double>(21, 0.0)}}), CapabilityError);
  CHECK_THROWS_AS(sample_sbn(SynthConfig{1, 0, g, w}), PreconditionError);
}

TEST_CASE("training recovers a planted model") {
  const GraphSpec g = full_graph(GraphKind::directed, 5, 3, {0, 1, 2, 3, 4});
  const WeightVector planted = random_weights(g, 1.0, 13);
  const Dataset train = sample_sbn(SynthConfig{14, 2000, g, planted});
  const Dataset test = sample_sbn(SynthConfig{15, 500, g, planted});
  TrainConfig config;
  config.lambda = 1.0 / 2000.0;
  const TrainResult trained = train_lmsbn(train, g, config);
  auto mean_loss = [&](const WeightVector& w) {
    double total = 0;
    for (const Instance& in : test.instances) total += oracle::loss(g, w.w, in.x, in.y);
    return total / static_cast<double>(test.size());
  };
  const double zero = mean_loss(WeightVector{std::vector<double>(g.num_cliques(), 0.0)});
  const double random = mean_loss(random_weights(g, 1.0, 16));
  const double fitted = mean_loss(trained.weights);
  MESSAGE("held-out mean loss: trained " << fitted << " zero " << zero << " random " << random);
  CHECK(zero == 5.0);
  CHECK(fitted < zero);
  CHECK(fitted < random);
}
