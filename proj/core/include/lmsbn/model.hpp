#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lmsbn/graph.hpp"

namespace lmsbn {

/// Output labels, one entry per node. Entries are +1 or -1; partial
/// assignments use 0 for "not assigned yet".
using Labels = std::vector<int>;

/// One real weight per clique, in GraphSpec::cliques() order, plus the
/// regularization constants the weights were trained with.
struct WeightVector {
  std::vector<double> w;
  double lambda = 1.0;
  double eta0 = 0.0;

  bool operator==(const WeightVector&) const = default;
};

/// Per-clique regularizer multiplier: 1 + eta0 for coupling cliques of an
/// undirected graph, 1 otherwise.
double clique_eta(const GraphSpec& graph, const WeightVector& weights, std::size_t j);

/// Throws PreconditionError unless the weight count matches the graph.
void check_weights(const GraphSpec& graph, const WeightVector& weights);

struct Instance {
  std::vector<double> x;
  Labels y;
};

struct Dataset {
  int num_outputs = 0;
  int input_dim = 0;
  std::vector<Instance> instances;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }
};

/// Throws PreconditionError unless every instance has the dataset's shape,
/// labels in {-1,+1} and finite inputs.
void check_dataset(const Dataset& data);

/// Throws PreconditionError unless the dataset's K and D agree with the graph.
void check_dataset(const Dataset& data, const GraphSpec& graph);

struct LossBreakdown {
  std::vector<double> per_node;
  double total = 0.0;
};

/// f_j(x, y) for a fully assigned clique.
double feature_value(const Clique& clique, std::span<const double> x, std::span<const int> y);

/// The model with its input fixed.
///
/// Every clique coefficient w_j * phi_j(x) is folded once; single-output
/// cliques of a node collapse into one bias. Scores and losses are then
/// cheap to evaluate for many label assignments, which is what the
/// inference routines do.
class ConditionedModel {
 public:
  ConditionedModel(const GraphSpec& graph, const WeightVector& weights, std::span<const double> x);

  const GraphSpec& graph() const noexcept { return *graph_; }
  int num_outputs() const noexcept { return graph_->num_outputs(); }

  /// s_i: the node's linear score with y_i factored out, so z_i = y_i * s_i.
  /// Every other member of the contributing cliques must be assigned.
  double score(int node, std::span<const int> y) const;

  /// Part of s_i coming from single-output cliques.
  double bias(int node) const { return bias_[static_cast<std::size_t>(node)]; }

  /// Sum over nodes (index order) of [1 - y_i s_i]_+.
  double loss(std::span<const int> y) const;

  /// Same value as loss(), for K <= 64, with y encoded as a bit mask whose
  /// bit k is set when y_k = -1. Bit-identical to loss() on the same labels.
  double loss_bits(std::uint64_t negatives) const;

  /// Sum over nodes of z_i (the BM energy is half of this).
  double margin_sum(std::span<const int> y) const;
  double margin_sum_bits(std::uint64_t negatives) const;

 private:
  struct Term {
    double coef;
    std::vector<int> others;
    std::uint64_t others_mask;
  };

  double score_bits(int node, std::uint64_t negatives) const;

  const GraphSpec* graph_;
  std::vector<double> bias_;
  std::vector<std::vector<Term>> terms_;
};

/// z_i for one node. Checks that every label the margin depends on is
/// assigned; throws PreconditionError otherwise.
double node_margin(const GraphSpec& graph, const WeightVector& weights,
                   std::span<const double> x, std::span<const int> y, int node);

/// Per-node hinge [1 - z_i]_+ and their total.
LossBreakdown joint_loss(const GraphSpec& graph, const WeightVector& weights, const Instance& instance);

/// log of the sigmoid belief network likelihood: sum_i log sigma(z_i).
double sbn_log_likelihood(const GraphSpec& graph, const WeightVector& weights, const Instance& instance);

/// Largest K for which exact partition functions and exhaustive search
/// are attempted.
inline constexpr int kMaxEnumerationOutputs = 25;

/// log of the Boltzmann machine likelihood conditioned on x, with the
/// partition function computed by enumerating all 2^K outputs.
double bm_log_likelihood(const GraphSpec& graph, const WeightVector& weights, const Instance& instance);

/// log(1 + e^{-z}) <= [1 - z]_+ + b with b = log(e + e^{-1}).
double surrogate_offset();

struct SurrogateBound {
  double log_loss;
  double hinge_plus_b;
};

SurrogateBound surrogate_bound_check(double z);

/// Numerically stable log(sigma(z)).
double log_sigmoid(double z);

}  // namespace lmsbn
