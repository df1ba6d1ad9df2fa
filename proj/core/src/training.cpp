#include "lmsbn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lmsbn/error.hpp"
#include "lmsbn/parallel.hpp"

namespace lmsbn {

void validate(const TrainConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) throw PreconditionError("lambda must be positive");
  if (!(config.eta0 >= 0.0) || !std::isfinite(config.eta0)) throw PreconditionError("eta0 must be non-negative");
  if (!(config.tolerance > 0.0)) throw PreconditionError("tolerance must be positive");
  if (config.max_epochs < 1) throw PreconditionError("max_epochs must be at least 1");
}

DualState initial_state(const DcdProblem& problem) {
  return {std::vector<double>(problem.rows.size(), 0.0), std::vector<double>(problem.num_weights, 0.0), 0};
}

namespace {

double row_dot(const SparseRow& row, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t n = 0; n < row.index.size(); ++n) s += w[row.index[n]] * row.value[n];
  return s;
}

}  // namespace

double dcd_primal(const DcdProblem& problem, const std::vector<double>& w) {
  double reg = 0.0;
  for (std::size_t j = 0; j < problem.num_weights; ++j) reg += problem.eta[j] * w[j] * w[j];
  double hinge = 0.0;
  for (const SparseRow& row : problem.rows) hinge += std::max(0.0, 1.0 - row_dot(row, w));
  return 0.5 * reg + problem.upper * hinge;
}

double dcd_dual(const DcdProblem& problem, const DualState& state) {
  double reg = 0.0;
  for (std::size_t j = 0; j < problem.num_weights; ++j) reg += problem.eta[j] * state.w[j] * state.w[j];
  const double linear = std::accumulate(state.alpha.begin(), state.alpha.end(), 0.0);
  return linear - 0.5 * reg;
}

double duality_gap(const DcdProblem& problem, const DualState& state) {
  return problem.lambda * (dcd_primal(problem, state.w) - dcd_dual(problem, state));
}

double stationarity_residual(const DcdProblem& problem, const DualState& state) {
  std::vector<double> expected(problem.num_weights, 0.0);
  for (std::size_t r = 0; r < problem.rows.size(); ++r) {
    const SparseRow& row = problem.rows[r];
    for (std::size_t n = 0; n < row.index.size(); ++n) {
      expected[row.index[n]] += state.alpha[r] * row.value[n] / problem.eta[row.index[n]];
    }
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.num_weights; ++j) worst = std::max(worst, std::abs(expected[j] - state.w[j]));
  return worst;
}

DcdStats solve_dcd(const DcdProblem& problem, DualState& state, const TrainConfig& config,
                   const DcdObserver& observer) {
  validate(config);
  if (problem.eta.size() != problem.num_weights) throw PreconditionError("eta length differs from weight count");
  if (state.alpha.size() != problem.rows.size() || state.w.size() != problem.num_weights) {
    throw PreconditionError("dual state does not match problem");
  }

  const double upper = problem.upper;
  std::vector<double> diag(problem.rows.size(), 0.0);
  for (std::size_t r = 0; r < problem.rows.size(); ++r) {
    const SparseRow& row = problem.rows[r];
    for (std::size_t n = 0; n < row.index.size(); ++n) diag[r] += row.value[n] * row.value[n] / problem.eta[row.index[n]];
  }

  std::vector<std::size_t> visit(problem.rows.size());
  std::iota(visit.begin(), visit.end(), std::size_t{0});
  std::mt19937_64 rng(config.shuffle_seed);

  DcdStats stats;
  stats.gap = duality_gap(problem, state);
  if (stats.gap <= config.tolerance) {
    stats.converged = true;
    return stats;
  }

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.shuffle) std::shuffle(visit.begin(), visit.end(), rng);
    double max_pg = 0.0;
    for (std::size_t r : visit) {
      const SparseRow& row = problem.rows[r];
      const double old_alpha = state.alpha[r];
      const double grad = row_dot(row, state.w) - 1.0;

      double projected = grad;
      if (old_alpha == 0.0) {
        projected = std::min(grad, 0.0);
      } else if (old_alpha == upper) {
        projected = std::max(grad, 0.0);
      }
      max_pg = std::max(max_pg, std::abs(projected));
      if (projected == 0.0) continue;

      double new_alpha;
      if (diag[r] > 0.0) {
        new_alpha = std::clamp(old_alpha - grad / diag[r], 0.0, upper);
      } else {
        // No features: the dual is linear in this coordinate.
        new_alpha = grad < 0.0 ? upper : 0.0;
      }
      state.alpha[r] = new_alpha;
      const double delta = new_alpha - old_alpha;
      if (delta != 0.0) {
        for (std::size_t n = 0; n < row.index.size(); ++n) {
          state.w[row.index[n]] += delta * row.value[n] / problem.eta[row.index[n]];
        }
      }
      if (observer) observer(state, r);
    }
    ++state.epoch;
    stats.epochs = epoch + 1;
    stats.max_pg = max_pg;
    stats.gap = duality_gap(problem, state);
    stats.gap_history.push_back(stats.gap);
    if (stats.gap <= config.tolerance) {
      stats.converged = true;
      break;
    }
  }
  return stats;
}

namespace {

void check_training_input(const Dataset& data, const GraphSpec& graph, const TrainConfig& config) {
  validate(config);
  if (data.empty()) throw PreconditionError("training set is empty");
  check_dataset(data, graph);
}

void append_row(DcdProblem& problem, const GraphSpec& graph, int node, const Instance& inst) {
  SparseRow row;
  for (std::size_t j : graph.contributing(node)) {
    const double f = feature_value(graph.cliques()[j], inst.x, inst.y);
    if (f == 0.0) continue;
    row.index.push_back(j);
    row.value.push_back(f);
  }
  problem.rows.push_back(std::move(row));
}

}  // namespace

DcdProblem lmsbn_node_problem(const Dataset& data, const GraphSpec& graph, int node, const TrainConfig& config) {
  if (!graph.directed()) throw PreconditionError("LMSBN training needs a directed graph");
  DcdProblem problem;
  problem.num_weights = graph.num_cliques();
  problem.eta.assign(problem.num_weights, 1.0);
  problem.upper = 1.0 / (config.lambda * static_cast<double>(data.size()));
  problem.lambda = config.lambda;
  problem.rows.reserve(data.size());
  for (const Instance& inst : data.instances) append_row(problem, graph, node, inst);
  return problem;
}

DcdProblem lmbm_problem(const Dataset& data, const GraphSpec& graph, const TrainConfig& config) {
  if (graph.directed()) throw PreconditionError("LMBM training needs an undirected graph");
  DcdProblem problem;
  problem.num_weights = graph.num_cliques();
  const WeightVector params{{}, config.lambda, config.eta0};
  problem.eta.resize(problem.num_weights);
  for (std::size_t j = 0; j < problem.num_weights; ++j) problem.eta[j] = clique_eta(graph, params, j);
  problem.upper = 1.0 / (config.lambda * static_cast<double>(data.size()));
  problem.lambda = config.lambda;
  problem.rows.reserve(data.size() * static_cast<std::size_t>(graph.num_outputs()));
  for (const Instance& inst : data.instances) {
    for (int i = 0; i < graph.num_outputs(); ++i) append_row(problem, graph, i, inst);
  }
  return problem;
}

int TrainResult::epochs() const {
  int most = 0;
  for (const DcdStats& s : stats) most = std::max(most, s.epochs);
  return most;
}

double TrainResult::gap() const {
  double total = 0.0;
  for (const DcdStats& s : stats) total += s.gap;
  return total;
}

bool TrainResult::converged() const {
  return std::all_of(stats.begin(), stats.end(), [](const DcdStats& s) { return s.converged; });
}

TrainResult train_lmsbn(const Dataset& data, const GraphSpec& graph, const TrainConfig& config) {
  if (!graph.directed()) throw PreconditionError("LMSBN training needs a directed graph");
  check_training_input(data, graph, config);

  const auto k = static_cast<std::size_t>(graph.num_outputs());
  TrainResult result;
  result.weights = {std::vector<double>(graph.num_cliques(), 0.0), config.lambda, config.eta0};
  result.stats.resize(k);
  std::vector<std::vector<double>> node_weights(k);

  parallel_for(k, [&](std::size_t node) {
    const DcdProblem problem = lmsbn_node_problem(data, graph, static_cast<int>(node), config);
    DualState state = initial_state(problem);
    TrainConfig node_config = config;
    node_config.shuffle_seed = config.shuffle_seed + node;
    result.stats[node] = solve_dcd(problem, state, node_config);
    node_weights[node] = std::move(state.w);
  });

  for (std::size_t j = 0; j < graph.num_cliques(); ++j) {
    result.weights.w[j] = node_weights[static_cast<std::size_t>(graph.owner(j))][j];
  }
  return result;
}

TrainResult train_lmbm(const Dataset& data, const GraphSpec& graph, const TrainConfig& config) {
  if (graph.directed()) throw PreconditionError("LMBM training needs an undirected graph");
  check_training_input(data, graph, config);

  const DcdProblem problem = lmbm_problem(data, graph, config);
  DualState state = initial_state(problem);
  TrainResult result;
  result.stats.push_back(solve_dcd(problem, state, config));
  result.weights = {std::move(state.w), config.lambda, config.eta0};
  return result;
}

double primal_objective(const Dataset& data, const GraphSpec& graph, const WeightVector& weights,
                        const TrainConfig& config) {
  check_weights(graph, weights);
  check_dataset(data, graph);
  double loss = 0.0;
  for (const Instance& inst : data.instances) loss += joint_loss(graph, weights, inst).total;
  if (!data.empty()) loss /= static_cast<double>(data.size());

  double norm = 0.0;
  double coupling = 0.0;
  for (std::size_t j = 0; j < weights.w.size(); ++j) {
    norm += weights.w[j] * weights.w[j];
    if (graph.is_coupling(j)) coupling += weights.w[j] * weights.w[j];
  }
  double value = loss + config.lambda * norm;
  if (!graph.directed()) value += config.lambda * config.eta0 * coupling;
  return value;
}

}  // namespace lmsbn
