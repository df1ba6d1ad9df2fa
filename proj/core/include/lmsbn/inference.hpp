#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "lmsbn/graph.hpp"
#include "lmsbn/model.hpp"

namespace lmsbn {

enum class InferenceStatus {
  proven_optimal,
  budget_exceeded,
  no_solution_under_S_fallback,
  /// ICM stopped at a point no single flip improves.
  local_optimum,
};

std::string_view to_string(InferenceStatus status);
std::optional<InferenceStatus> parse_status(std::string_view word);

struct BBConfig {
  /// Initial upper bound S (>= 1). Leaves with loss >= S are never accepted.
  double cutoff = 1e9;
  /// Branch evaluations allowed before giving up; 0 means unlimited.
  std::uint64_t max_states = 0;
  /// When no leaf beats S, double S and search again.
  bool escalate = false;
  int max_escalations = 30;
};

struct InferenceResult {
  Labels y_hat;
  double objective = 0.0;
  std::uint64_t states_visited = 0;
  /// Value of states_visited when the returned leaf was first reached.
  std::uint64_t states_at_best = 0;
  InferenceStatus status = InferenceStatus::proven_optimal;
  /// False when y_hat is the greedy fallback rather than a leaf the search
  /// accepted.
  bool searched_leaf = true;
};

/// Depth-first branch and bound over the topological order. Each node tries
/// the label that makes its margin non-negative first (+1 on a zero score),
/// then the opposite one. A "state" is one such label evaluation.
InferenceResult bb_infer(const ConditionedModel& model, const BBConfig& config);
InferenceResult bb_infer(const GraphSpec& graph, const WeightVector& weights,
                         std::span<const double> x, const BBConfig& config);

/// The all-left path: every node takes the sign of its score given its
/// parents. This is the first leaf branch and bound visits.
Labels greedy_labels(const ConditionedModel& model);

/// Minimizer of the joint hinge loss over all 2^K assignments. Ties go to
/// the lexicographically first assignment with +1 before -1.
InferenceResult exhaustive_infer(const ConditionedModel& model);
InferenceResult exhaustive_infer(const GraphSpec& graph, const WeightVector& weights, std::span<const double> x);

/// Iterated conditional modes on the joint hinge loss: sweep nodes in graph
/// order and flip a label whenever that strictly lowers the loss.
InferenceResult icm_infer(const ConditionedModel& model, Labels y0, int max_sweeps);
InferenceResult icm_infer(const GraphSpec& graph, const WeightVector& weights, std::span<const double> x,
                          Labels y0, int max_sweeps);

/// Starting point used for ICM when none is given: each node takes the
/// sign of its single-output cliques alone.
Labels unary_labels(const ConditionedModel& model);

/// sum_{i < ceil(S)} C(K, i) * K branch evaluations, saturating at
/// UINT64_MAX: K evaluations for every leaf with fewer than S right
/// branches, which are the only leaves that can have loss below S.
std::uint64_t cutoff_state_budget(int num_outputs, double cutoff);

}  // namespace lmsbn
