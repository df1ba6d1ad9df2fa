#include "lmsbn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmsbn/error.hpp"

namespace lmsbn {

std::string_view to_string(InferenceStatus status) {
  switch (status) {
    case InferenceStatus::proven_optimal: return "proven_optimal";
    case InferenceStatus::budget_exceeded: return "budget_exceeded";
    case InferenceStatus::no_solution_under_S_fallback: return "no_solution_under_S_fallback";
    case InferenceStatus::local_optimum: return "local_optimum";
  }
  return "unknown";
}

std::optional<InferenceStatus> parse_status(std::string_view word) {
  for (auto s : {InferenceStatus::proven_optimal, InferenceStatus::budget_exceeded,
                 InferenceStatus::no_solution_under_S_fallback, InferenceStatus::local_optimum}) {
    if (to_string(s) == word) return s;
  }
  return std::nullopt;
}

Labels greedy_labels(const ConditionedModel& model) {
  Labels y(static_cast<std::size_t>(model.num_outputs()), 0);
  for (int node : model.graph().order()) {
    y[static_cast<std::size_t>(node)] = model.score(node, y) >= 0.0 ? 1 : -1;
  }
  return y;
}

Labels unary_labels(const ConditionedModel& model) {
  Labels y(static_cast<std::size_t>(model.num_outputs()));
  for (int i = 0; i < model.num_outputs(); ++i) y[static_cast<std::size_t>(i)] = model.bias(i) >= 0.0 ? 1 : -1;
  return y;
}

namespace {

struct SearchOutcome {
  bool found = false;
  bool out_of_budget = false;
  Labels best;
  std::uint64_t states_at_best = 0;
};

// One depth-first pass with the upper bound starting at `cutoff`.
// `states` carries over between passes so the budget covers escalations.
SearchOutcome search(const ConditionedModel& model, double cutoff, std::uint64_t budget, std::uint64_t& states) {
  const auto& order = model.graph().order();
  const int k = model.num_outputs();
  const auto ku = static_cast<std::size_t>(k);

  SearchOutcome out;
  Labels y(ku, 0);
  std::vector<double> partial(ku + 1, 0.0);
  std::vector<double> magnitude(ku, 0.0);
  // 0: nothing tried, 1: left tried, 2: both tried (or right skipped)
  std::vector<unsigned char> stage(ku, 0);
  double upper = cutoff;

  int depth = 0;
  while (depth >= 0) {
    const auto d = static_cast<std::size_t>(depth);
    if (depth == k) {
      if (partial[ku] < upper) {
        upper = partial[ku];
        out.best = y;
        out.found = true;
        out.states_at_best = states;
      }
      --depth;
      continue;
    }

    const int node = order[d];
    const auto n = static_cast<std::size_t>(node);
    if (stage[d] == 2) {
      y[n] = 0;
      stage[d] = 0;
      --depth;
      continue;
    }
    if (budget != 0 && states >= budget) {
      out.out_of_budget = true;
      break;
    }
    ++states;

    double cost;
    if (stage[d] == 0) {
      const double s = model.score(node, y);
      magnitude[d] = std::abs(s);
      y[n] = s >= 0.0 ? 1 : -1;
      cost = std::max(0.0, 1.0 - magnitude[d]);
      stage[d] = 1;
    } else {
      y[n] = -y[n];
      cost = 1.0 + magnitude[d];
      stage[d] = 2;
    }

    partial[d + 1] = partial[d] + cost;
    if (partial[d + 1] >= upper) {
      // The right branch never costs less than the left one.
      stage[d] = 2;
      continue;
    }
    ++depth;
  }
  return out;
}

}  // namespace

InferenceResult bb_infer(const ConditionedModel& model, const BBConfig& config) {
  if (!model.graph().directed()) throw PreconditionError("branch and bound inference needs a directed graph");
  if (!(config.cutoff >= 1.0)) throw PreconditionError("cutoff S must be at least 1");

  InferenceResult result;
  double cutoff = config.cutoff;
  int escalations = 0;
  for (;;) {
    SearchOutcome outcome = search(model, cutoff, config.max_states, result.states_visited);
    if (outcome.out_of_budget) {
      result.status = InferenceStatus::budget_exceeded;
      if (outcome.found) {
        result.y_hat = std::move(outcome.best);
        result.states_at_best = outcome.states_at_best;
      } else {
        result.y_hat = greedy_labels(model);
        result.states_at_best = result.states_visited;
        result.searched_leaf = false;
      }
      break;
    }
    if (outcome.found) {
      result.status = InferenceStatus::proven_optimal;
      result.y_hat = std::move(outcome.best);
      result.states_at_best = outcome.states_at_best;
      break;
    }
    if (config.escalate && escalations < config.max_escalations && std::isfinite(cutoff)) {
      cutoff *= 2.0;
      ++escalations;
      continue;
    }
    result.status = InferenceStatus::no_solution_under_S_fallback;
    result.y_hat = greedy_labels(model);
    result.states_at_best = result.states_visited;
    result.searched_leaf = false;
    break;
  }
  result.objective = model.loss(result.y_hat);
  return result;
}

InferenceResult bb_infer(const GraphSpec& graph, const WeightVector& weights,
                         std::span<const double> x, const BBConfig& config) {
  if (!graph.directed()) throw PreconditionError("branch and bound inference needs a directed graph");
  return bb_infer(ConditionedModel(graph, weights, x), config);
}

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t reverse_bits(std::uint64_t m, int width) {
  std::uint64_t r = 0;
  for (int b = 0; b < width; ++b) r |= ((m >> b) & 1) << (width - 1 - b);
  return r;
}

}  // namespace

InferenceResult exhaustive_infer(const ConditionedModel& model) {
  const int k = model.num_outputs();
  if (k > kMaxEnumerationOutputs) {
    throw CapabilityError("exhaustive inference limited to K <= " + std::to_string(kMaxEnumerationOutputs));
  }
  const std::uint64_t count = std::uint64_t{1} << k;
  std::uint64_t best_mask = 0;
  double best = model.loss_bits(0);
  for (std::uint64_t m = 1; m < count; ++m) {
    const double value = model.loss_bits(m);
    // Bit k of the mask is label k; lexicographic rank is the reversed mask.
    if (value < best || (value == best && reverse_bits(m, k) < reverse_bits(best_mask, k))) {
      best = value;
      best_mask = m;
    }
  }

  InferenceResult result;
  result.y_hat.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) result.y_hat[static_cast<std::size_t>(i)] = ((best_mask >> i) & 1) ? -1 : 1;
  result.objective = model.loss(result.y_hat);
  result.states_visited = count;
  result.states_at_best = count;
  result.status = InferenceStatus::proven_optimal;
  return result;
}

InferenceResult exhaustive_infer(const GraphSpec& graph, const WeightVector& weights, std::span<const double> x) {
  return exhaustive_infer(ConditionedModel(graph, weights, x));
}

InferenceResult icm_infer(const ConditionedModel& model, Labels y0, int max_sweeps) {
  const int k = model.num_outputs();
  if (y0.size() != static_cast<std::size_t>(k)) throw PreconditionError("initial labels have wrong length");
  for (int v : y0) {
    if (v != 1 && v != -1) throw PreconditionError("initial labels must be +1 or -1");
  }
  if (max_sweeps < 0) throw PreconditionError("max_sweeps must be non-negative");

  InferenceResult result;
  result.y_hat = std::move(y0);
  double current = model.loss(result.y_hat);
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool flipped = false;
    for (int node : model.graph().order()) {
      auto& label = result.y_hat[static_cast<std::size_t>(node)];
      label = -label;
      ++result.states_visited;
      const double candidate = model.loss(result.y_hat);
      if (candidate < current) {
        current = candidate;
        flipped = true;
        result.states_at_best = result.states_visited;
      } else {
        label = -label;
      }
    }
    if (!flipped) {
      converged = true;
      break;
    }
  }
  result.objective = current;
  if (!converged) {
    result.status = InferenceStatus::budget_exceeded;
  } else {
    result.status = k == 1 ? InferenceStatus::proven_optimal : InferenceStatus::local_optimum;
  }
  return result;
}

InferenceResult icm_infer(const GraphSpec& graph, const WeightVector& weights, std::span<const double> x,
                          Labels y0, int max_sweeps) {
  return icm_infer(ConditionedModel(graph, weights, x), std::move(y0), max_sweeps);
}

std::uint64_t cutoff_state_budget(int num_outputs, double cutoff) {
  if (num_outputs < 1 || !(cutoff >= 1.0)) throw PreconditionError("budget needs K >= 1 and S >= 1");
  constexpr auto kMax = static_cast<u128>(UINT64_MAX);
  const auto k = static_cast<u128>(num_outputs);
  const double top = std::min(std::ceil(cutoff) - 1.0, static_cast<double>(num_outputs));

  u128 binom = 1;  // C(K, 0)
  u128 total = 0;
  for (int i = 0; static_cast<double>(i) <= top; ++i) {
    if (i > 0) binom = binom * (k - static_cast<unsigned>(i - 1)) / static_cast<unsigned>(i);
    total += binom * k;
    if (total >= kMax || binom >= kMax) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace lmsbn
