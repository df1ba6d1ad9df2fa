#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lmsbn {

enum class GraphKind { directed, undirected };

/// A set of outputs, optionally multiplied by one input coordinate.
///
/// The feature is f(x, y) = (prod_{k in outputs} y_k) * phi(x) where
/// phi(x) = x[input] when an input is attached and 1 otherwise. Indices are
/// 0-based. `outputs` is kept sorted and duplicate-free by GraphSpec.
struct Clique {
  std::vector<int> outputs;
  std::optional<int> input;

  bool operator==(const Clique&) const = default;
};

/// Output graph over K binary outputs and D real inputs.
///
/// For directed graphs each clique is owned by the member that comes last in
/// `order`; every other member is therefore a parent of the owner. For
/// undirected graphs a clique enters the margin of every member.
///
/// Immutable after construction.
class GraphSpec {
 public:
  /// Validates and normalizes; throws PreconditionError on a bad order,
  /// out-of-range index, empty clique or duplicate clique.
  GraphSpec(GraphKind kind, int num_outputs, int input_dim,
            std::vector<int> order, std::vector<Clique> cliques);

  GraphKind kind() const noexcept { return kind_; }
  bool directed() const noexcept { return kind_ == GraphKind::directed; }
  int num_outputs() const noexcept { return num_outputs_; }
  int input_dim() const noexcept { return input_dim_; }

  const std::vector<int>& order() const noexcept { return order_; }
  /// Position of `node` in the topological order.
  int position(int node) const { return position_.at(static_cast<std::size_t>(node)); }

  const std::vector<Clique>& cliques() const noexcept { return cliques_; }
  std::size_t num_cliques() const noexcept { return cliques_.size(); }

  /// Indices of the cliques whose feature enters z_node.
  std::span<const std::size_t> contributing(int node) const;

  /// Owning node of clique j (directed graphs only).
  int owner(std::size_t j) const;

  /// True when clique j couples at least two outputs.
  bool is_coupling(std::size_t j) const { return cliques_.at(j).outputs.size() >= 2; }

  bool operator==(const GraphSpec& other) const {
    return kind_ == other.kind_ && num_outputs_ == other.num_outputs_ &&
           input_dim_ == other.input_dim_ && order_ == other.order_ &&
           cliques_ == other.cliques_;
  }

 private:
  GraphKind kind_;
  int num_outputs_;
  int input_dim_;
  std::vector<int> order_;
  std::vector<int> position_;
  std::vector<Clique> cliques_;
  std::vector<int> owner_;
  std::vector<std::vector<std::size_t>> contributing_;
};

/// Unary cliques {i}, unary-with-input cliques ({i}, d) for every d, and a
/// pairwise clique for every output pair.
GraphSpec full_graph(GraphKind kind, int num_outputs, int input_dim, std::vector<int> order);

/// Like full_graph, but pairwise cliques only join outputs adjacent in `order`.
GraphSpec chain_graph(GraphKind kind, int num_outputs, int input_dim, std::vector<int> order);

/// Unary and unary-with-input cliques only; K unrelated binary problems.
GraphSpec independent_graph(GraphKind kind, int num_outputs, int input_dim);

}  // namespace lmsbn
