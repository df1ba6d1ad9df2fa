#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lmsbn/graph.hpp"
#include "lmsbn/metrics.hpp"
#include "lmsbn/model.hpp"
#include "lmsbn/training.hpp"

namespace lmsbn {

/// One row of the cutoff sweep.
struct BenchRecord {
  double cutoff = 1.0;
  /// Branch evaluations allowed for this S.
  std::uint64_t budget = 0;
  std::size_t instances = 0;
  /// Share of instances where branch and bound reached a leaf whose loss
  /// equals the exhaustive minimum within the budget.
  double fraction_optimal = 0.0;
  double mean_states = 0.0;
  std::uint64_t max_states = 0;
  /// Mean joint hinge loss of the true labels.
  double mean_loss = 0.0;
  /// 1 - mean_loss / S, clamped to [0, 1].
  double bound = 0.0;
};

/// For every S, runs branch and bound on each instance with the budget
/// cutoff_state_budget(K, S) (capped by max_states when non-zero) and
/// compares against the exhaustive minimum.
std::vector<BenchRecord> cutoff_sweep(const GraphSpec& graph, const WeightVector& weights, const Dataset& data,
                                      std::span<const double> cutoffs, std::uint64_t max_states = 0);

inline constexpr const char* kBenchRecordHeader = "S,budget,instances,fraction_optimal,mean_states,max_states,mean_loss,bound";
void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records);

struct SizeSweepConfig {
  std::vector<int> sizes;
  int input_dim = 5;
  std::size_t train_instances = 500;
  std::size_t test_instances = 200;
  double planted_stddev = 1.0;
  /// Scale of the untrained comparison model; 0 matches the root-mean-square
  /// of the trained weights.
  double random_stddev = 0.1;
  TrainConfig train;
  std::uint64_t seed = 1;
  /// Branch evaluations allowed per instance; 0 means unlimited.
  std::uint64_t max_states = 0;
};

/// Mean and max visited states for one model at one K.
struct SizeRecord {
  int num_outputs = 0;
  /// "trained" or "random".
  std::string model;
  double mean_states = 0.0;
  std::uint64_t max_states = 0;
  std::uint64_t exhaustive_states = 0;
  double mean_loss = 0.0;
};

/// For each K: plants a fully connected directed model, samples training
/// and test sets from it, trains an LMSBN, and runs unbounded branch and
/// bound on the test set with the trained weights and with random weights
/// of scale random_stddev.
std::vector<SizeRecord> size_sweep(const SizeSweepConfig& config);

inline constexpr const char* kSizeRecordHeader = "K,model,mean_states,max_states,exhaustive_states,mean_loss";
void write_size_csv(std::ostream& out, std::span<const SizeRecord> records);

/// Fits a least-squares line to log(mean_states) against log(K); the slope
/// is the apparent polynomial degree.
double log_log_slope(std::span<const int> sizes, std::span<const double> mean_states);

struct ComparisonReport {
  MetricReport independent;
  MetricReport lmsbn_index;
  MetricReport lmsbn_fscore;
  std::vector<int> fscore_order;
  double seconds = 0.0;
};

/// Independent linear classifiers against fully connected LMSBNs with index
/// and F-score order, all trained by the same solver and scored on `test`.
ComparisonReport compare_with_independent(const Dataset& train, const Dataset& test, const TrainConfig& config);

/// Branch and bound predictions (S unbounded) for every test instance.
std::vector<Labels> predict_all(const GraphSpec& graph, const WeightVector& weights, const Dataset& data);

}  // namespace lmsbn
