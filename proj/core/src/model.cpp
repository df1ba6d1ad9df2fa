#include "lmsbn/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "lmsbn/error.hpp"

namespace lmsbn {

double clique_eta(const GraphSpec& graph, const WeightVector& weights, std::size_t j) {
  if (graph.kind() == GraphKind::undirected && graph.is_coupling(j)) return 1.0 + weights.eta0;
  return 1.0;
}

void check_weights(const GraphSpec& graph, const WeightVector& weights) {
  if (weights.w.size() != graph.num_cliques()) {
    throw PreconditionError("weight vector has " + std::to_string(weights.w.size()) +
                            " entries, graph has " + std::to_string(graph.num_cliques()) + " cliques");
  }
}

namespace {

void check_instance_shape(const Instance& inst, int num_outputs, int input_dim, std::size_t index) {
  const auto where = "instance " + std::to_string(index);
  if (inst.y.size() != static_cast<std::size_t>(num_outputs)) throw PreconditionError(where + ": label count mismatch");
  if (inst.x.size() != static_cast<std::size_t>(input_dim)) throw PreconditionError(where + ": input dimension mismatch");
  for (int v : inst.y) {
    if (v != 1 && v != -1) throw PreconditionError(where + ": labels must be +1 or -1");
  }
  for (double v : inst.x) {
    if (!std::isfinite(v)) throw PreconditionError(where + ": non-finite input");
  }
}

}  // namespace

void check_dataset(const Dataset& data) {
  for (std::size_t l = 0; l < data.instances.size(); ++l) {
    check_instance_shape(data.instances[l], data.num_outputs, data.input_dim, l);
  }
}

void check_dataset(const Dataset& data, const GraphSpec& graph) {
  if (data.num_outputs != graph.num_outputs() || data.input_dim != graph.input_dim()) {
    throw PreconditionError("dataset shape (K=" + std::to_string(data.num_outputs) + ", D=" +
                            std::to_string(data.input_dim) + ") does not match graph (K=" +
                            std::to_string(graph.num_outputs()) + ", D=" + std::to_string(graph.input_dim()) + ")");
  }
  check_dataset(data);
}

double feature_value(const Clique& clique, std::span<const double> x, std::span<const int> y) {
  double f = clique.input ? x[static_cast<std::size_t>(*clique.input)] : 1.0;
  for (int k : clique.outputs) f *= y[static_cast<std::size_t>(k)];
  return f;
}

ConditionedModel::ConditionedModel(const GraphSpec& graph, const WeightVector& weights, std::span<const double> x)
    : graph_(&graph) {
  check_weights(graph, weights);
  if (x.size() != static_cast<std::size_t>(graph.input_dim())) throw PreconditionError("input dimension mismatch");
  const int k = graph.num_outputs();
  bias_.assign(static_cast<std::size_t>(k), 0.0);
  terms_.assign(static_cast<std::size_t>(k), {});
  for (int i = 0; i < k; ++i) {
    for (std::size_t j : graph.contributing(i)) {
      const Clique& c = graph.cliques()[j];
      const double coef = weights.w[j] * (c.input ? x[static_cast<std::size_t>(*c.input)] : 1.0);
      if (c.outputs.size() == 1) {
        bias_[static_cast<std::size_t>(i)] += coef;
        continue;
      }
      Term t{coef, {}, 0};
      for (int other : c.outputs) {
        if (other == i) continue;
        t.others.push_back(other);
        if (other < 64) t.others_mask |= std::uint64_t{1} << other;
      }
      terms_[static_cast<std::size_t>(i)].push_back(std::move(t));
    }
  }
}

double ConditionedModel::score(int node, std::span<const int> y) const {
  const auto i = static_cast<std::size_t>(node);
  double s = bias_[i];
  for (const Term& t : terms_[i]) {
    double prod = t.coef;
    for (int k : t.others) prod *= y[static_cast<std::size_t>(k)];
    s += prod;
  }
  return s;
}

double ConditionedModel::score_bits(int node, std::uint64_t negatives) const {
  const auto i = static_cast<std::size_t>(node);
  double s = bias_[i];
  for (const Term& t : terms_[i]) {
    s += (std::popcount(t.others_mask & negatives) & 1) ? -t.coef : t.coef;
  }
  return s;
}

double ConditionedModel::loss(std::span<const int> y) const {
  double total = 0.0;
  for (int i = 0; i < num_outputs(); ++i) {
    const double z = y[static_cast<std::size_t>(i)] * score(i, y);
    total += std::max(0.0, 1.0 - z);
  }
  return total;
}

double ConditionedModel::loss_bits(std::uint64_t negatives) const {
  double total = 0.0;
  for (int i = 0; i < num_outputs(); ++i) {
    const double s = score_bits(i, negatives);
    const double z = ((negatives >> i) & 1) ? -s : s;
    total += std::max(0.0, 1.0 - z);
  }
  return total;
}

double ConditionedModel::margin_sum(std::span<const int> y) const {
  double total = 0.0;
  for (int i = 0; i < num_outputs(); ++i) total += y[static_cast<std::size_t>(i)] * score(i, y);
  return total;
}

double ConditionedModel::margin_sum_bits(std::uint64_t negatives) const {
  double total = 0.0;
  for (int i = 0; i < num_outputs(); ++i) {
    const double s = score_bits(i, negatives);
    total += ((negatives >> i) & 1) ? -s : s;
  }
  return total;
}

double node_margin(const GraphSpec& graph, const WeightVector& weights,
                   std::span<const double> x, std::span<const int> y, int node) {
  if (node < 0 || node >= graph.num_outputs()) throw PreconditionError("node index out of range");
  if (y.size() != static_cast<std::size_t>(graph.num_outputs())) throw PreconditionError("label vector has wrong length");
  if (y[static_cast<std::size_t>(node)] == 0) {
    throw PreconditionError("label of node " + std::to_string(node) + " is not assigned");
  }
  for (std::size_t j : graph.contributing(node)) {
    for (int k : graph.cliques()[j].outputs) {
      if (y[static_cast<std::size_t>(k)] == 0) {
        throw PreconditionError("margin of node " + std::to_string(node) + " needs the label of node " +
                                std::to_string(k));
      }
    }
  }
  const ConditionedModel model(graph, weights, x);
  return y[static_cast<std::size_t>(node)] * model.score(node, y);
}

LossBreakdown joint_loss(const GraphSpec& graph, const WeightVector& weights, const Instance& instance) {
  check_instance_shape(instance, graph.num_outputs(), graph.input_dim(), 0);
  const ConditionedModel model(graph, weights, instance.x);
  LossBreakdown out;
  out.per_node.resize(static_cast<std::size_t>(graph.num_outputs()));
  for (int i = 0; i < graph.num_outputs(); ++i) {
    const double z = instance.y[static_cast<std::size_t>(i)] * model.score(i, instance.y);
    out.per_node[static_cast<std::size_t>(i)] = std::max(0.0, 1.0 - z);
    out.total += out.per_node[static_cast<std::size_t>(i)];
  }
  return out;
}

double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sbn_log_likelihood(const GraphSpec& graph, const WeightVector& weights, const Instance& instance) {
  if (!graph.directed()) throw PreconditionError("sigmoid belief network likelihood needs a directed graph");
  check_instance_shape(instance, graph.num_outputs(), graph.input_dim(), 0);
  const ConditionedModel model(graph, weights, instance.x);
  double total = 0.0;
  for (int i = 0; i < graph.num_outputs(); ++i) {
    total += log_sigmoid(instance.y[static_cast<std::size_t>(i)] * model.score(i, instance.y));
  }
  return total;
}

double bm_log_likelihood(const GraphSpec& graph, const WeightVector& weights, const Instance& instance) {
  if (graph.directed()) throw PreconditionError("Boltzmann machine likelihood needs an undirected graph");
  if (graph.num_outputs() > kMaxEnumerationOutputs) {
    throw CapabilityError("exact partition function limited to K <= " + std::to_string(kMaxEnumerationOutputs));
  }
  check_instance_shape(instance, graph.num_outputs(), graph.input_dim(), 0);
  const ConditionedModel model(graph, weights, instance.x);

  const std::uint64_t count = std::uint64_t{1} << graph.num_outputs();
  // Streaming log-sum-exp over all outputs.
  double peak = -INFINITY;
  double partition = 0.0;
  for (std::uint64_t m = 0; m < count; ++m) {
    const double e = 0.5 * model.margin_sum_bits(m);
    if (e > peak) {
      partition = partition * std::exp(peak - e) + 1.0;
      peak = e;
    } else {
      partition += std::exp(e - peak);
    }
  }
  return 0.5 * model.margin_sum(instance.y) - (peak + std::log(partition));
}

double surrogate_offset() { return std::log(std::exp(1.0) + std::exp(-1.0)); }

SurrogateBound surrogate_bound_check(double z) {
  return {-log_sigmoid(z), std::max(0.0, 1.0 - z) + surrogate_offset()};
}

}  // namespace lmsbn
