#include "lmsbn/graph.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

#include "lmsbn/error.hpp"

namespace lmsbn {

GraphSpec::GraphSpec(GraphKind kind, int num_outputs, int input_dim,
                     std::vector<int> order, std::vector<Clique> cliques)
    : kind_(kind),
      num_outputs_(num_outputs),
      input_dim_(input_dim),
      order_(std::move(order)),
      cliques_(std::move(cliques)) {
  if (num_outputs_ < 1) throw PreconditionError("graph needs at least one output");
  if (input_dim_ < 0) throw PreconditionError("negative input dimension");
  const auto k = static_cast<std::size_t>(num_outputs_);
  if (order_.size() != k) throw PreconditionError("order length differs from output count");

  position_.assign(k, -1);
  for (std::size_t p = 0; p < k; ++p) {
    const int node = order_[p];
    if (node < 0 || node >= num_outputs_ || position_[static_cast<std::size_t>(node)] != -1) {
      throw PreconditionError("order is not a permutation of the outputs");
    }
    position_[static_cast<std::size_t>(node)] = static_cast<int>(p);
  }

  std::set<std::pair<std::vector<int>, int>> seen;
  contributing_.assign(k, {});
  owner_.assign(cliques_.size(), -1);
  for (std::size_t j = 0; j < cliques_.size(); ++j) {
    Clique& c = cliques_[j];
    if (c.outputs.empty()) throw PreconditionError("clique " + std::to_string(j) + " has no outputs");
    std::sort(c.outputs.begin(), c.outputs.end());
    if (std::adjacent_find(c.outputs.begin(), c.outputs.end()) != c.outputs.end()) {
      throw PreconditionError("clique " + std::to_string(j) + " repeats an output");
    }
    if (c.outputs.front() < 0 || c.outputs.back() >= num_outputs_) {
      throw PreconditionError("clique " + std::to_string(j) + " output index out of range");
    }
    if (c.input && (*c.input < 0 || *c.input >= input_dim_)) {
      throw PreconditionError("clique " + std::to_string(j) + " input index out of range");
    }
    if (!seen.emplace(c.outputs, c.input.value_or(-1)).second) {
      throw PreconditionError("duplicate clique " + std::to_string(j));
    }

    if (kind_ == GraphKind::directed) {
      int owner = c.outputs.front();
      for (int node : c.outputs) {
        if (position_[static_cast<std::size_t>(node)] > position_[static_cast<std::size_t>(owner)]) owner = node;
      }
      owner_[j] = owner;
      contributing_[static_cast<std::size_t>(owner)].push_back(j);
    } else {
      for (int node : c.outputs) contributing_[static_cast<std::size_t>(node)].push_back(j);
    }
  }
}

std::span<const std::size_t> GraphSpec::contributing(int node) const {
  if (node < 0 || node >= num_outputs_) throw PreconditionError("node index out of range");
  return contributing_[static_cast<std::size_t>(node)];
}

int GraphSpec::owner(std::size_t j) const {
  if (kind_ != GraphKind::directed) throw PreconditionError("clique ownership is defined for directed graphs only");
  return owner_.at(j);
}

namespace {

std::vector<Clique> unary_cliques(int num_outputs, int input_dim) {
  std::vector<Clique> cliques;
  for (int i = 0; i < num_outputs; ++i) {
    cliques.push_back({{i}, std::nullopt});
    for (int d = 0; d < input_dim; ++d) cliques.push_back({{i}, d});
  }
  return cliques;
}

}  // namespace

GraphSpec full_graph(GraphKind kind, int num_outputs, int input_dim, std::vector<int> order) {
  auto cliques = unary_cliques(num_outputs, input_dim);
  for (int i = 0; i < num_outputs; ++i) {
    for (int j = i + 1; j < num_outputs; ++j) cliques.push_back({{i, j}, std::nullopt});
  }
  return GraphSpec(kind, num_outputs, input_dim, std::move(order), std::move(cliques));
}

GraphSpec chain_graph(GraphKind kind, int num_outputs, int input_dim, std::vector<int> order) {
  auto cliques = unary_cliques(num_outputs, input_dim);
  for (std::size_t p = 0; p + 1 < order.size(); ++p) {
    cliques.push_back({{order[p], order[p + 1]}, std::nullopt});
  }
  return GraphSpec(kind, num_outputs, input_dim, std::move(order), std::move(cliques));
}

GraphSpec independent_graph(GraphKind kind, int num_outputs, int input_dim) {
  std::vector<int> order(static_cast<std::size_t>(std::max(num_outputs, 0)));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return GraphSpec(kind, num_outputs, input_dim, std::move(order), unary_cliques(num_outputs, input_dim));
}

}  // namespace lmsbn
