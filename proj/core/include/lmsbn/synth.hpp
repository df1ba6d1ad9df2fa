#pragma once

#include <cstddef>
#include <cstdint>

#include "lmsbn/graph.hpp"
#include "lmsbn/model.hpp"

namespace lmsbn {

/// Inputs are drawn i.i.d. standard normal when the planted graph has
/// D > 0; with D = 0 instances carry no inputs.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t num_instances = 100;
  GraphSpec planted_graph;
  WeightVector planted_weights;
};

/// Ancestral sampling in topological order: y_i = +1 with probability
/// sigma(s_i) given the already sampled parents.
Dataset sample_sbn(const SynthConfig& config);

/// Largest K for which sample_bm enumerates the conditional table.
inline constexpr int kMaxBmSampleOutputs = 20;

/// Exact sampling from the Boltzmann machine conditional by enumerating all
/// 2^K outputs for each input.
Dataset sample_bm(const SynthConfig& config);

/// Weights drawn i.i.d. N(0, stddev^2).
WeightVector random_weights(const GraphSpec& graph, double stddev, std::uint64_t seed);

}  // namespace lmsbn
