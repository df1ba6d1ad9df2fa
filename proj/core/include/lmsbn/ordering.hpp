#pragma once

#include <span>
#include <vector>

#include "lmsbn/model.hpp"
#include "lmsbn/training.hpp"

namespace lmsbn {

enum class OrderKind { index, fscore };

/// How the topological order of a directed model is chosen. For the fscore
/// kind, `per_label_fscores` holds one score in [0, 1] per label.
struct OrderStrategy {
  OrderKind kind = OrderKind::index;
  std::vector<double> per_label_fscores;

  std::vector<int> order(int num_outputs) const;
};

/// 0, 1, ..., K-1.
std::vector<int> index_order(int num_outputs);

/// Labels sorted by descending score; equal scores keep ascending index.
std::vector<int> order_by_scores(std::span<const double> scores);

/// Trains one independent linear classifier per label with the LMSBN
/// solver and records each label's F score on the training set.
OrderStrategy probe_fscores(const Dataset& data, const TrainConfig& config);

/// order_by_scores(probe_fscores(data, config).per_label_fscores).
std::vector<int> fscore_order(const Dataset& data, const TrainConfig& config);

}  // namespace lmsbn
