#include "lmsbn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "lmsbn/error.hpp"
#include "lmsbn/inference.hpp"
#include "lmsbn/io.hpp"
#include "lmsbn/ordering.hpp"
#include "lmsbn/parallel.hpp"
#include "lmsbn/synth.hpp"

namespace lmsbn {

std::vector<BenchRecord> cutoff_sweep(const GraphSpec& graph, const WeightVector& weights, const Dataset& data,
                                      std::span<const double> cutoffs, std::uint64_t max_states) {
  if (!graph.directed()) throw PreconditionError("the cutoff sweep needs a directed model");
  if (data.empty()) throw PreconditionError("the cutoff sweep needs test data");
  check_weights(graph, weights);
  check_dataset(data, graph);
  for (double s : cutoffs) {
    if (!(s >= 1.0)) throw PreconditionError("every S must be at least 1");
  }

  const std::size_t n = data.size();
  std::vector<double> optimum(n);
  std::vector<double> truth_loss(n);
  parallel_for(n, [&](std::size_t l) {
    const ConditionedModel model(graph, weights, data.instances[l].x);
    optimum[l] = exhaustive_infer(model).objective;
    truth_loss[l] = model.loss(data.instances[l].y);
  });
  double mean_loss = 0.0;
  for (double v : truth_loss) mean_loss += v;
  mean_loss /= static_cast<double>(n);

  std::vector<BenchRecord> records;
  for (double s : cutoffs) {
    BenchRecord rec;
    rec.cutoff = s;
    rec.budget = cutoff_state_budget(graph.num_outputs(), s);
    if (max_states != 0) rec.budget = std::min(rec.budget, max_states);
    rec.instances = n;
    rec.mean_loss = mean_loss;
    rec.bound = std::clamp(1.0 - mean_loss / s, 0.0, 1.0);

    std::vector<InferenceResult> results(n);
    const BBConfig config{s, rec.budget, false, 0};
    parallel_for(n, [&](std::size_t l) { results[l] = bb_infer(graph, weights, data.instances[l].x, config); });

    std::size_t hits = 0;
    double states = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (results[l].searched_leaf && results[l].objective == optimum[l]) ++hits;
      states += static_cast<double>(results[l].states_visited);
      rec.max_states = std::max(rec.max_states, results[l].states_visited);
    }
    rec.fraction_optimal = static_cast<double>(hits) / static_cast<double>(n);
    rec.mean_states = states / static_cast<double>(n);
    records.push_back(rec);
  }
  return records;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
  out << kBenchRecordHeader << '\n';
  for (const BenchRecord& r : records) {
    out << format_double(r.cutoff) << ',' << r.budget << ',' << r.instances << ',' << format_double(r.fraction_optimal)
        << ',' << format_double(r.mean_states) << ',' << r.max_states << ',' << format_double(r.mean_loss) << ','
        << format_double(r.bound) << '\n';
  }
}

std::vector<Labels> predict_all(const GraphSpec& graph, const WeightVector& weights, const Dataset& data) {
  std::vector<Labels> preds(data.size());
  const BBConfig config;
  parallel_for(data.size(), [&](std::size_t l) {
    preds[l] = bb_infer(graph, weights, data.instances[l].x, config).y_hat;
  });
  return preds;
}

namespace {

SizeRecord measure(int k, const char* name, const GraphSpec& graph, const WeightVector& weights, const Dataset& test,
                   std::uint64_t max_states) {
  const std::size_t n = test.size();
  std::vector<std::uint64_t> states(n);
  std::vector<double> loss(n);
  const BBConfig config{1e9, max_states, false, 0};
  parallel_for(n, [&](std::size_t l) {
    const ConditionedModel model(graph, weights, test.instances[l].x);
    states[l] = bb_infer(model, config).states_visited;
    loss[l] = model.loss(test.instances[l].y);
  });

  SizeRecord rec;
  rec.num_outputs = k;
  rec.model = name;
  rec.exhaustive_states = std::uint64_t{1} << k;
  double total_states = 0.0;
  double total_loss = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    total_states += static_cast<double>(states[l]);
    rec.max_states = std::max(rec.max_states, states[l]);
    total_loss += loss[l];
  }
  rec.mean_states = total_states / static_cast<double>(n);
  rec.mean_loss = total_loss / static_cast<double>(n);
  return rec;
}

}  // namespace

std::vector<SizeRecord> size_sweep(const SizeSweepConfig& config) {
  validate(config.train);
  if (config.train_instances < 1 || config.test_instances < 1) throw PreconditionError("size sweep needs data");
  if (config.input_dim < 0) throw PreconditionError("input dimension must be non-negative");
  if (!(config.random_stddev >= 0.0)) throw PreconditionError("random_stddev must be non-negative");

  std::vector<SizeRecord> records;
  for (int k : config.sizes) {
    if (k < 1 || k > 63) throw PreconditionError("size sweep K must lie in 1..63");
    const std::uint64_t base = config.seed * 1000003ULL + static_cast<std::uint64_t>(k) * 7919ULL;
    const GraphSpec graph = full_graph(GraphKind::directed, k, config.input_dim, index_order(k));
    const WeightVector planted = random_weights(graph, config.planted_stddev, base);
    const Dataset train = sample_sbn({base + 1, config.train_instances, graph, planted});
    const Dataset test = sample_sbn({base + 2, config.test_instances, graph, planted});

    TrainConfig tc = config.train;
    tc.shuffle_seed = base + 3;
    const WeightVector trained = train_lmsbn(train, graph, tc).weights;

    double scale = config.random_stddev;
    if (scale == 0.0) {
      double sq = 0.0;
      for (double w : trained.w) sq += w * w;
      scale = std::sqrt(sq / static_cast<double>(trained.w.size()));
    }
    const WeightVector random = random_weights(graph, scale, base + 4);

    records.push_back(measure(k, "trained", graph, trained, test, config.max_states));
    records.push_back(measure(k, "random", graph, random, test, config.max_states));
  }
  return records;
}

void write_size_csv(std::ostream& out, std::span<const SizeRecord> records) {
  out << kSizeRecordHeader << '\n';
  for (const SizeRecord& r : records) {
    out << r.num_outputs << ',' << r.model << ',' << format_double(r.mean_states) << ',' << r.max_states << ','
        << r.exhaustive_states << ',' << format_double(r.mean_loss) << '\n';
  }
}

double log_log_slope(std::span<const int> sizes, std::span<const double> mean_states) {
  if (sizes.size() != mean_states.size() || sizes.size() < 2) {
    throw PreconditionError("slope needs at least two matching points");
  }
  const auto n = static_cast<double>(sizes.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || !(mean_states[i] > 0.0)) throw PreconditionError("slope needs positive sizes and counts");
    const double x = std::log(static_cast<double>(sizes[i]));
    const double y = std::log(mean_states[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionError("slope needs at least two distinct sizes");
  return (n * sxy - sx * sy) / denom;
}

ComparisonReport compare_with_independent(const Dataset& train, const Dataset& test, const TrainConfig& config) {
  if (train.empty() || test.empty()) throw PreconditionError("comparison needs training and test data");
  if (train.num_outputs != test.num_outputs || train.input_dim != test.input_dim) {
    throw PreconditionError("training and test sets differ in shape");
  }
  const auto start = std::chrono::steady_clock::now();
  const int k = train.num_outputs;
  const int d = train.input_dim;

  std::vector<Labels> truths;
  truths.reserve(test.size());
  for (const Instance& inst : test.instances) truths.push_back(inst.y);

  ComparisonReport report;
  const OrderStrategy probe = probe_fscores(train, config);
  report.fscore_order = probe.order(k);

  const GraphSpec independent = independent_graph(GraphKind::directed, k, d);
  const WeightVector base = train_lmsbn(train, independent, config).weights;
  report.independent = evaluate(truths, predict_all(independent, base, test));

  const GraphSpec by_index = full_graph(GraphKind::directed, k, d, index_order(k));
  report.lmsbn_index = evaluate(truths, predict_all(by_index, train_lmsbn(train, by_index, config).weights, test));

  const GraphSpec by_fscore = full_graph(GraphKind::directed, k, d, report.fscore_order);
  report.lmsbn_fscore = evaluate(truths, predict_all(by_fscore, train_lmsbn(train, by_fscore, config).weights, test));

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace lmsbn
