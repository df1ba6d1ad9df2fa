#include "lmsbn/ordering.hpp"

#include <algorithm>
#include <numeric>

#include "lmsbn/error.hpp"
#include "lmsbn/inference.hpp"
#include "lmsbn/metrics.hpp"

namespace lmsbn {

std::vector<int> index_order(int num_outputs) {
  if (num_outputs < 1) throw PreconditionError("order needs at least one output");
  std::vector<int> order(static_cast<std::size_t>(num_outputs));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<int> order_by_scores(std::span<const double> scores) {
  std::vector<int> order = index_order(static_cast<int>(scores.size()));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  return order;
}

std::vector<int> OrderStrategy::order(int num_outputs) const {
  if (kind == OrderKind::index) return index_order(num_outputs);
  if (per_label_fscores.size() != static_cast<std::size_t>(num_outputs)) {
    throw PreconditionError("fscore ordering needs one score per label");
  }
  for (double f : per_label_fscores) {
    if (!(f >= 0.0 && f <= 1.0)) throw PreconditionError("F scores must lie in [0, 1]");
  }
  return order_by_scores(per_label_fscores);
}

OrderStrategy probe_fscores(const Dataset& data, const TrainConfig& config) {
  if (data.empty()) throw PreconditionError("fscore ordering needs training data");
  const GraphSpec probes = independent_graph(GraphKind::directed, data.num_outputs, data.input_dim);
  const TrainResult trained = train_lmsbn(data, probes, config);

  std::vector<Labels> truths;
  std::vector<Labels> preds;
  truths.reserve(data.size());
  preds.reserve(data.size());
  for (const Instance& inst : data.instances) {
    truths.push_back(inst.y);
    preds.push_back(greedy_labels(ConditionedModel(probes, trained.weights, inst.x)));
  }
  return {OrderKind::fscore, per_label_fscores(truths, preds)};
}

std::vector<int> fscore_order(const Dataset& data, const TrainConfig& config) {
  return probe_fscores(data, config).order(data.num_outputs);
}

}  // namespace lmsbn
