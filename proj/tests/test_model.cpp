#include <doctest.h>

#include <cmath>
#include <random>

#include "lmsbn/error.hpp"
#include "lmsbn/graph.hpp"
#include "lmsbn/model.hpp"
#include "oracles.hpp"

using namespace lmsbn;

namespace {

// K=2, D=1: ({1}, x_1) and ({1,2}) with unit weights, order (1,2).
GraphSpec two_node_graph() {
  return GraphSpec(GraphKind::directed, 2, 1, {0, 1}, {{{0}, 0}, {{0, 1}, std::nullopt}});
}

const WeightVector kUnit{{1.0, 1.0}};

}  // namespace

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0, 0}, {}), PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0}, {}), PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0, 1}, {{{}, std::nullopt}}), PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0, 1}, {{{2}, std::nullopt}}), PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0, 1}, {{{0}, 0}}), PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0, 1}, {{{0, 0}, std::nullopt}}), PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 2, 0, {0, 1}, {{{0, 1}, std::nullopt}, {{1, 0}, std::nullopt}}),
                  PreconditionError);
  CHECK_THROWS_AS(GraphSpec(GraphKind::directed, 0, 0, {}, {}), PreconditionError);

  const GraphSpec g(GraphKind::directed, 3, 0, {2, 0, 1}, {{{1, 0}, std::nullopt}});
  CHECK(g.cliques()[0].outputs == std::vector<int>{0, 1});
  CHECK(g.position(2) == 0);
}

TEST_CASE("directed ownership goes to the latest member") {
  const GraphSpec g(GraphKind::directed, 3, 0, {2, 0, 1},
                    {{{0, 1}, std::nullopt}, {{0, 2}, std::nullopt}, {{2}, std::nullopt}, {{0, 1, 2}, std::nullopt}});
  CHECK(g.owner(0) == 1);
  CHECK(g.owner(1) == 0);
  CHECK(g.owner(2) == 2);
  CHECK(g.owner(3) == 1);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 7);
    const GraphSpec dg = oracle::random_graph(GraphKind::directed, k, 2, rng);
    const GraphSpec ug(GraphKind::undirected, k, 2, dg.order(), dg.cliques());
    std::vector<int> directed_hits(dg.num_cliques(), 0);
    std::vector<int> undirected_hits(dg.num_cliques(), 0);
    for (int i = 0; i < k; ++i) {
      for (std::size_t j : dg.contributing(i)) ++directed_hits[j];
      for (std::size_t j : ug.contributing(i)) ++undirected_hits[j];
    }
    for (std::size_t j = 0; j < dg.num_cliques(); ++j) {
      CHECK(directed_hits[j] == 1);
      CHECK(undirected_hits[j] == static_cast<int>(dg.cliques()[j].outputs.size()));
      CHECK(dg.owner(j) == oracle::latest_member(dg, dg.cliques()[j]));
    }
  }
}

TEST_CASE("graph builders") {
  const GraphSpec full = full_graph(GraphKind::directed, 3, 2, {0, 1, 2});
  CHECK(full.num_cliques() == 3 + 3 * 2 + 3);
  const GraphSpec chain = chain_graph(GraphKind::directed, 4, 1, {2, 0, 3, 1});
  int pairs = 0;
  for (const Clique& c : chain.cliques()) {
    if (c.outputs.size() != 2) continue;
    ++pairs;
    CHECK(std::abs(chain.position(c.outputs[0]) - chain.position(c.outputs[1])) == 1);
  }
  CHECK(pairs == 3);
  const GraphSpec ind = independent_graph(GraphKind::undirected, 3, 4);
  CHECK(ind.num_cliques() == 3 * 5);
  for (std::size_t j = 0; j < ind.num_cliques(); ++j) CHECK_FALSE(ind.is_coupling(j));
}

TEST_CASE("node margin examples") {
  const GraphSpec g = two_node_graph();
  const std::vector<double> x{2.0};
  CHECK(node_margin(g, kUnit, x, Labels{1, 1}, 0) == doctest::Approx(2.0));
  CHECK(node_margin(g, kUnit, x, Labels{1, 1}, 1) == doctest::Approx(1.0));
  CHECK(node_margin(g, kUnit, x, Labels{1, 1}, 0) == doctest::Approx(oracle::margin(g, kUnit.w, x, {1, 1}, 0)));
  CHECK(node_margin(g, kUnit, x, Labels{1, 1}, 1) == doctest::Approx(oracle::margin(g, kUnit.w, x, {1, 1}, 1)));
  CHECK(node_margin(g, WeightVector{{0.0, 0.0}}, x, Labels{-1, 1}, 1) == 0.0);

  // Node 1 needs only its own label; node 2 needs its parent.
  CHECK(node_margin(g, kUnit, x, Labels{1, 0}, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(node_margin(g, kUnit, x, Labels{0, 1}, 1), PreconditionError);
  CHECK_THROWS_AS(node_margin(g, kUnit, x, Labels{1, 1}, 2), PreconditionError);
  CHECK_THROWS_AS(node_margin(g, kUnit, x, Labels{1}, 0), PreconditionError);

  const GraphSpec ug(GraphKind::undirected, 2, 1, {0, 1}, g.cliques());
  CHECK_THROWS_AS(node_margin(ug, kUnit, x, Labels{1, 0}, 0), PreconditionError);
  CHECK(node_margin(ug, kUnit, x, Labels{1, -1}, 0) == doctest::Approx(2.0 - 1.0));
}

TEST_CASE("joint loss examples") {
  const GraphSpec g = two_node_graph();
  const LossBreakdown good = joint_loss(g, kUnit, {{2.0}, {1, 1}});
  CHECK(good.per_node == std::vector<double>{0.0, 0.0});
  CHECK(good.total == 0.0);
  const LossBreakdown bad = joint_loss(g, kUnit, {{2.0}, {-1, 1}});
  CHECK(bad.per_node[0] == doctest::Approx(3.0));
  CHECK(bad.per_node[1] == doctest::Approx(2.0));
  CHECK(bad.total == doctest::Approx(5.0));

  const GraphSpec g3 = full_graph(GraphKind::directed, 3, 2, {0, 1, 2});
  const WeightVector zero{std::vector<double>(g3.num_cliques(), 0.0)};
  CHECK(joint_loss(g3, zero, {{0.3, -1.0}, {1, -1, 1}}).total == 3.0);
}

TEST_CASE("conditioned model agrees with the brute-force oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 8);
    const int d = static_cast<int>(rng() % 4);
    const auto kind = trial % 2 ? GraphKind::directed : GraphKind::undirected;
    const GraphSpec g = oracle::random_graph(kind, k, d, rng);
    const WeightVector w{oracle::normal_vector(g.num_cliques(), rng)};
    const std::vector<double> x = oracle::normal_vector(static_cast<std::size_t>(d), rng);
    const Labels y = oracle::random_labels(k, rng);
    const ConditionedModel m(g, w, x);

    std::uint64_t mask = 0;
    double margins = 0.0;
    for (int i = 0; i < k; ++i) {
      if (y[static_cast<std::size_t>(i)] < 0) mask |= std::uint64_t{1} << i;
      const double z = oracle::margin(g, w.w, x, y, i);
      margins += z;
      CHECK(node_margin(g, w, x, y, i) == doctest::Approx(z).epsilon(1e-12));
      CHECK(y[static_cast<std::size_t>(i)] * m.score(i, y) == doctest::Approx(z).epsilon(1e-12));
    }
    CHECK(m.loss(y) == doctest::Approx(oracle::loss(g, w.w, x, y)).epsilon(1e-12));
    CHECK(m.loss_bits(mask) == m.loss(y));
    CHECK(m.margin_sum(y) == doctest::Approx(margins).epsilon(1e-12));
    CHECK(m.margin_sum_bits(mask) == m.margin_sum(y));
    CHECK(joint_loss(g, w, {x, y}).total == doctest::Approx(m.loss(y)).epsilon(1e-12));
  }
}

TEST_CASE("parity: flipping a member negates the feature") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 6);
    const std::vector<Clique> cliques = oracle::random_cliques(k, 2, rng);
    const Clique& c = cliques[rng() % cliques.size()];
    const std::vector<double> x = oracle::normal_vector(2, rng);
    Labels y = oracle::random_labels(k, rng);
    const double before = feature_value(c, x, y);
    const int flip = c.outputs[rng() % c.outputs.size()];
    y[static_cast<std::size_t>(flip)] *= -1;
    CHECK(feature_value(c, x, y) == -before);
  }
}

TEST_CASE("flipping a node negates its own margin in a directed model") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 7);
    const GraphSpec g = oracle::random_graph(GraphKind::directed, k, 2, rng);
    const WeightVector w{oracle::normal_vector(g.num_cliques(), rng)};
    const std::vector<double> x = oracle::normal_vector(2, rng);
    Labels y = oracle::random_labels(k, rng);
    const int i = static_cast<int>(rng() % static_cast<unsigned>(k));
    const double z = node_margin(g, w, x, y, i);
    y[static_cast<std::size_t>(i)] *= -1;
    CHECK(node_margin(g, w, x, y, i) == doctest::Approx(-z).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid belief network likelihood") {
  const GraphSpec g3 = full_graph(GraphKind::directed, 3, 1, {0, 1, 2});
  const WeightVector zero{std::vector<double>(g3.num_cliques(), 0.0)};
  CHECK(sbn_log_likelihood(g3, zero, {{0.4}, {1, -1, 1}}) == doctest::Approx(3.0 * std::log(0.5)));

  const GraphSpec g = two_node_graph();
  const double expected = oracle::log_sigmoid(2.0) + oracle::log_sigmoid(1.0);
  CHECK(sbn_log_likelihood(g, kUnit, {{2.0}, {1, 1}}) == doctest::Approx(expected));
  double total = 0.0;
  oracle::for_each_assignment(2, [&](const Labels& y) { total += std::exp(sbn_log_likelihood(g, kUnit, {{2.0}, y})); });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const GraphSpec ug(GraphKind::undirected, 2, 1, {0, 1}, g.cliques());
  CHECK_THROWS_AS(sbn_log_likelihood(ug, kUnit, {{2.0}, {1, 1}}), PreconditionError);
}

TEST_CASE("Boltzmann machine likelihood") {
  const GraphSpec g2 = full_graph(GraphKind::undirected, 2, 0, {0, 1});
  const WeightVector zero{std::vector<double>(g2.num_cliques(), 0.0)};
  CHECK(bm_log_likelihood(g2, zero, {{}, {1, -1}}) == doctest::Approx(std::log(0.25)));

  const GraphSpec edge(GraphKind::undirected, 2, 0, {0, 1}, {{{0, 1}, std::nullopt}});
  const WeightVector one{{1.0}};
  const double agree = std::exp(1.0) / (2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0));
  CHECK(std::exp(bm_log_likelihood(edge, one, {{}, {1, 1}})) == doctest::Approx(agree));
  CHECK(std::exp(bm_log_likelihood(edge, one, {{}, {-1, -1}})) == doctest::Approx(agree));
  CHECK(std::exp(bm_log_likelihood(edge, one, {{}, {1, -1}})) ==
        doctest::Approx(std::exp(-1.0) / (2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0))));

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 6);
    const GraphSpec g = oracle::random_graph(GraphKind::undirected, k, 2, rng);
    const WeightVector w{oracle::normal_vector(g.num_cliques(), rng)};
    const std::vector<double> x = oracle::normal_vector(2, rng);
    const Labels y = oracle::random_labels(k, rng);
    CHECK(bm_log_likelihood(g, w, {x, y}) == doctest::Approx(oracle::bm_log_likelihood(g, w.w, x, y)).epsilon(1e-10));
  }

  CHECK_THROWS_AS(bm_log_likelihood(two_node_graph(), kUnit, {{2.0}, {1, 1}}), PreconditionError);
  const GraphSpec big = independent_graph(GraphKind::undirected, 26, 0);
  CHECK_THROWS_AS(bm_log_likelihood(big, WeightVector{std::vector<double>(26, 0.0)}, {{}, Labels(26, 1)}),
                  CapabilityError);
}

TEST_CASE("surrogate bound") {
  const double b = std::log(std::exp(1.0) + std::exp(-1.0));
  CHECK(surrogate_offset() == doctest::Approx(b));
  CHECK(surrogate_offset() == doctest::Approx(1.1269).epsilon(1e-4));

  const SurrogateBound at0 = surrogate_bound_check(0.0);
  CHECK(at0.log_loss == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(at0.hinge_plus_b == doctest::Approx(1.0 + b));
  const SurrogateBound at1 = surrogate_bound_check(1.0);
  CHECK(at1.log_loss == doctest::Approx(std::log1p(std::exp(-1.0))));
  CHECK(at1.log_loss == doctest::Approx(0.3133).epsilon(1e-4));
  CHECK(at1.hinge_plus_b == doctest::Approx(b));
  const SurrogateBound atm3 = surrogate_bound_check(-3.0);
  CHECK(atm3.log_loss == doctest::Approx(3.0486).epsilon(1e-4));
  CHECK(atm3.hinge_plus_b == doctest::Approx(4.0 + b));

  for (int i = -20000; i <= 20000; ++i) {
    const SurrogateBound s = surrogate_bound_check(i * 1e-3);
    REQUIRE(s.hinge_plus_b - s.log_loss >= -1e-12);
  }
}

TEST_CASE("weights and datasets are checked") {
  const GraphSpec g = two_node_graph();
  CHECK_THROWS_AS(check_weights(g, WeightVector{{1.0}}), PreconditionError);
  Dataset data{2, 1, {{{1.0}, {1, -1}}}};
  CHECK_NOTHROW(check_dataset(data, g));
  data.instances[0].y[1] = 0;
  CHECK_THROWS_AS(check_dataset(data), PreconditionError);
  data.instances[0].y[1] = 1;
  data.instances[0].x[0] = NAN;
  CHECK_THROWS_AS(check_dataset(data), PreconditionError);
  CHECK_THROWS_AS(check_dataset(Dataset{3, 1, {}}, g), PreconditionError);

  const GraphSpec ug = full_graph(GraphKind::undirected, 2, 1, {0, 1});
  const WeightVector w{std::vector<double>(ug.num_cliques(), 0.0), 1.0, 2.0};
  for (std::size_t j = 0; j < ug.num_cliques(); ++j) {
    CHECK(clique_eta(ug, w, j) == (ug.is_coupling(j) ? 3.0 : 1.0));
    CHECK(clique_eta(full_graph(GraphKind::directed, 2, 1, {0, 1}), w, j) == 1.0);
  }
}
