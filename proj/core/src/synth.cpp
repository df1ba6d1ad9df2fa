#include "lmsbn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lmsbn/error.hpp"

namespace lmsbn {

namespace {

void check_config(const SynthConfig& config) {
  if (config.num_instances < 1) throw PreconditionError("synthetic data needs at least one instance");
  check_weights(config.planted_graph, config.planted_weights);
  for (double w : config.planted_weights.w) {
    if (!std::isfinite(w)) throw PreconditionError("planted weights must be finite");
  }
}

std::vector<double> draw_inputs(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (double& v : x) v = normal(rng);
  return x;
}

bool uses_inputs(const GraphSpec& graph) {
  for (const Clique& c : graph.cliques()) {
    if (c.input) return true;
  }
  return false;
}

}  // namespace

Dataset sample_sbn(const SynthConfig& config) {
  const GraphSpec& graph = config.planted_graph;
  if (!graph.directed()) throw PreconditionError("sample_sbn needs a directed planted graph");
  check_config(config);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data{graph.num_outputs(), graph.input_dim(), {}};
  data.instances.reserve(config.num_instances);
  for (std::size_t l = 0; l < config.num_instances; ++l) {
    Instance inst;
    inst.x = draw_inputs(graph.input_dim(), rng);
    inst.y.assign(static_cast<std::size_t>(graph.num_outputs()), 0);
    const ConditionedModel model(graph, config.planted_weights, inst.x);
    for (int node : graph.order()) {
      const double p_positive = std::exp(log_sigmoid(model.score(node, inst.y)));
      inst.y[static_cast<std::size_t>(node)] = unit(rng) < p_positive ? 1 : -1;
    }
    data.instances.push_back(std::move(inst));
  }
  return data;
}

namespace {

// Cumulative distribution over output masks (bit k set means y_k = -1).
std::vector<double> bm_cdf(const ConditionedModel& model) {
  const std::uint64_t count = std::uint64_t{1} << model.num_outputs();
  std::vector<double> energy(count);
  double peak = -INFINITY;
  for (std::uint64_t m = 0; m < count; ++m) {
    energy[m] = 0.5 * model.margin_sum_bits(m);
    peak = std::max(peak, energy[m]);
  }
  double running = 0.0;
  for (double& e : energy) {
    running += std::exp(e - peak);
    e = running;
  }
  for (double& e : energy) e /= running;
  return energy;
}

Labels draw_from(const std::vector<double>& cdf, int num_outputs, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  const auto m = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  Labels y(static_cast<std::size_t>(num_outputs));
  for (int k = 0; k < num_outputs; ++k) y[static_cast<std::size_t>(k)] = ((m >> k) & 1) ? -1 : 1;
  return y;
}

}  // namespace

Dataset sample_bm(const SynthConfig& config) {
  const GraphSpec& graph = config.planted_graph;
  if (graph.directed()) throw PreconditionError("sample_bm needs an undirected planted graph");
  if (graph.num_outputs() > kMaxBmSampleOutputs) {
    throw CapabilityError("exact Boltzmann sampling limited to K <= " + std::to_string(kMaxBmSampleOutputs));
  }
  check_config(config);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data{graph.num_outputs(), graph.input_dim(), {}};
  data.instances.reserve(config.num_instances);

  std::vector<double> shared_cdf;
  if (!uses_inputs(graph)) {
    const std::vector<double> none(static_cast<std::size_t>(graph.input_dim()), 0.0);
    shared_cdf = bm_cdf(ConditionedModel(graph, config.planted_weights, none));
  }
  for (std::size_t l = 0; l < config.num_instances; ++l) {
    Instance inst;
    inst.x = draw_inputs(graph.input_dim(), rng);
    const double u = unit(rng);
    if (shared_cdf.empty()) {
      inst.y = draw_from(bm_cdf(ConditionedModel(graph, config.planted_weights, inst.x)), graph.num_outputs(), u);
    } else {
      inst.y = draw_from(shared_cdf, graph.num_outputs(), u);
    }
    data.instances.push_back(std::move(inst));
  }
  return data;
}

WeightVector random_weights(const GraphSpec& graph, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) throw PreconditionError("stddev must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  WeightVector weights;
  weights.w.resize(graph.num_cliques());
  for (double& w : weights.w) w = stddev * normal(rng);
  return weights;
}

}  // namespace lmsbn
