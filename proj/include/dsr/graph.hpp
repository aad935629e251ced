#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dsr {

using NodeId = std::uint32_t;

/// Undirected edge in canonical order (u < v) with a positive weight.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Edge as read from an external source: possibly directed, possibly a
/// self-loop, weight optional.
struct RawEdge {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::optional<double> w;
};

struct Neighbor {
  NodeId node = 0;
  double w = 0.0;
  std::size_t edge = 0;  // index into WeightedGraph::edges()
};

/// Immutable undirected weighted simple graph on nodes 0..n-1.
///
/// Edges are kept as a flat list sorted by (u, v) with u < v; a CSR
/// adjacency index is derived from it at construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t n);

  /// Builds from edges that are already canonical: u < v < n, sorted,
  /// unique, w > 0. Throws InputError otherwise.
  static WeightedGraph from_canonical(std::size_t n, std::vector<Edge> edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<std::size_t> find_edge(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return find_edge(u, v).has_value(); }

  /// Same topology, new weights aligned with edges().
  WeightedGraph with_weights(std::span<const double> weights) const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  void build_index();

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// Symmetrizes, drops self-loops, merges parallel edges by summing weights
/// and defaults missing weights to 1.
WeightedGraph build_graph(std::span<const RawEdge> raw, std::size_t n);

/// x^T L x = sum over edges of w (x_u - x_v)^2.
double laplacian_quadratic_form(const WeightedGraph& g, std::span<const double> x);

/// y = L x.
void laplacian_apply(const WeightedGraph& g, std::span<const double> x, std::span<double> y);

std::vector<double> weighted_degrees(const WeightedGraph& g);
std::vector<std::size_t> unweighted_degrees(const WeightedGraph& g);
double total_edge_weight(const WeightedGraph& g);

struct ComponentLabeling {
  std::vector<std::size_t> component;  // per node, dense ids 0..count-1
  std::size_t count = 0;

  /// Node lists per component, each ascending.
  std::vector<std::vector<NodeId>> members() const;
};

/// Component ids are assigned in order of each component's smallest node.
ComponentLabeling connected_components(const WeightedGraph& g);

/// Induced subgraph with nodes relabelled 0..k-1 in the order given.
struct Subgraph {
  WeightedGraph graph;
  std::vector<NodeId> to_parent;
};

Subgraph induced_subgraph(const WeightedGraph& g, std::span<const NodeId> nodes);

/// Reassembles per-component graphs onto the parent node ids.
WeightedGraph merge_subgraphs(std::size_t n, std::span<const Subgraph> parts);

}  // namespace dsr
