#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lmsbn/graph.hpp"
#include "lmsbn/model.hpp"

namespace lmsbn {

struct TrainConfig {
  double lambda = 1e-2;
  double eta0 = 0.0;
  int max_epochs = 1000;
  /// Stop once the scaled duality gap of a problem drops to this value.
  double tolerance = 1e-4;
  std::uint64_t shuffle_seed = 1;
  /// Visit coordinates in a fresh random order every epoch. When false the
  /// order is fixed (row order), which makes runs easier to compare.
  bool shuffle = true;
};

/// Throws PreconditionError unless lambda > 0, eta0 >= 0, tolerance > 0 and
/// max_epochs >= 1.
void validate(const TrainConfig& config);

/// One hinge constraint sum_j w_j f_j >= 1 - xi as a sparse row.
struct SparseRow {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

/// The dual coordinate descent problem
///
///   min_w  1/2 sum_j eta_j w_j^2 + C sum_r [1 - w . f_r]_+ ,   C = 1/(lambda N)
///
/// whose dual over alpha_r in [0, C] is
///
///   D(alpha) = sum_r alpha_r - 1/2 sum_j eta_j w_j(alpha)^2,
///   w_j(alpha) = (1/eta_j) sum_r alpha_r f_rj .
struct DcdProblem {
  std::size_t num_weights = 0;
  std::vector<double> eta;
  std::vector<SparseRow> rows;
  double upper = 1.0;   // C
  double lambda = 1.0;  // scale used to report gaps in loss units
};

struct DualState {
  std::vector<double> alpha;
  std::vector<double> w;
  int epoch = 0;
};

struct DcdStats {
  int epochs = 0;
  double gap = 0.0;
  double max_pg = 0.0;
  bool converged = false;
  /// Scaled gap after each epoch.
  std::vector<double> gap_history;
};

/// alpha = 0, w = 0.
DualState initial_state(const DcdProblem& problem);

double dcd_primal(const DcdProblem& problem, const std::vector<double>& w);
double dcd_dual(const DcdProblem& problem, const DualState& state);

/// lambda * (primal - dual): the gap expressed in the units of
/// (1/N) sum loss + (lambda/2) sum eta_j w_j^2. Zero at the optimum, K at
/// the initial state.
double duality_gap(const DcdProblem& problem, const DualState& state);

/// max_j |w_j - (1/eta_j) sum_r alpha_r f_rj|.
double stationarity_residual(const DcdProblem& problem, const DualState& state);

/// Called after every coordinate update with the row just visited.
using DcdObserver = std::function<void(const DualState&, std::size_t row)>;

/// Runs dual coordinate descent from `state` until the scaled gap is at most
/// config.tolerance or config.max_epochs epochs have run.
DcdStats solve_dcd(const DcdProblem& problem, DualState& state, const TrainConfig& config,
                   const DcdObserver& observer = {});

/// Rows (node, l) for l = 0..N-1 over the cliques owned by `node`, with
/// parent labels taken from the training data.
DcdProblem lmsbn_node_problem(const Dataset& data, const GraphSpec& graph, int node, const TrainConfig& config);

/// Rows (i, l), instance-major, over every clique contributing to z_i.
DcdProblem lmbm_problem(const Dataset& data, const GraphSpec& graph, const TrainConfig& config);

struct TrainResult {
  WeightVector weights;
  /// One entry per node for LMSBN training, a single entry for LMBM.
  std::vector<DcdStats> stats;

  /// Largest epoch count over the problems.
  int epochs() const;
  /// Sum of the per-problem gaps: the gap of the whole objective.
  double gap() const;
  /// True when every problem reached the tolerance.
  bool converged() const;
};

/// K independent hinge-loss problems, one per node.
TrainResult train_lmsbn(const Dataset& data, const GraphSpec& graph, const TrainConfig& config);

/// Joint dual coordinate descent over all (node, instance) multipliers.
TrainResult train_lmbm(const Dataset& data, const GraphSpec& graph, const TrainConfig& config);

/// (1/N) sum_l L(y_l, x_l, w) + lambda ||w||^2 + lambda eta0 ||w_coupling||^2,
/// the eta0 term applying to undirected graphs only.
double primal_objective(const Dataset& data, const GraphSpec& graph, const WeightVector& weights,
                        const TrainConfig& config);

}  // namespace lmsbn
