#include "dsr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "dsr/error.hpp"

namespace dsr {

WeightedGraph::WeightedGraph(std::size_t n) : n_(n), offsets_(n + 1, 0) {}

WeightedGraph WeightedGraph::from_canonical(std::size_t n, std::vector<Edge> edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (!(e.u < e.v) || e.v >= n) {
      throw InputError("edge " + std::to_string(i) + " is not canonical (u < v < n)");
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw InputError("edge " + std::to_string(i) + " has a non-positive weight");
    }
    if (i > 0) {
      const Edge& p = edges[i - 1];
      if (p.u > e.u || (p.u == e.u && p.v >= e.v)) {
        throw InputError("edges are not sorted and unique at index " + std::to_string(i));
      }
    }
  }
  WeightedGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.build_index();
  return g;
}

void WeightedGraph::build_index() {
  offsets_.assign(n_ + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.assign(2 * edges_.size(), Neighbor{});
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[fill[e.u]++] = {e.v, e.w, i};
    adjacency_[fill[e.v]++] = {e.u, e.w, i};
  }
  // Edges are sorted by (u, v), so each node's list ends up ordered by
  // neighbor id except for the interleaving of lower/higher neighbors.
  for (std::size_t v = 0; v < n_; ++v) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

std::span<const Neighbor> WeightedGraph::neighbors(NodeId v) const {
  return std::span<const Neighbor>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::optional<std::size_t> WeightedGraph::find_edge(NodeId u, NodeId v) const {
  if (u == v) return std::nullopt;
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{u, v},
                             [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
                               return e.u < key.first || (e.u == key.first && e.v < key.second);
                             });
  if (it == edges_.end() || it->u != u || it->v != v) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

WeightedGraph WeightedGraph::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw InputError("weight vector is not aligned with edges");
  std::vector<Edge> edges = edges_;
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].w = weights[i];
  return from_canonical(n_, std::move(edges));
}

WeightedGraph build_graph(std::span<const RawEdge> raw, std::size_t n) {
  if (n == 0 && !raw.empty()) throw InputError("graph with zero nodes cannot have edges");
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawEdge& r = raw[i];
    if (r.u < 0 || r.v < 0 || static_cast<std::uint64_t>(r.u) >= n ||
        static_cast<std::uint64_t>(r.v) >= n) {
      throw InputError("edge " + std::to_string(i) + " has a node id outside [0, " +
                       std::to_string(n) + ")");
    }
    const double w = r.w.value_or(1.0);
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InputError("edge " + std::to_string(i) + " has a non-positive weight");
    }
    if (r.u == r.v) continue;
    const auto a = static_cast<NodeId>(std::min(r.u, r.v));
    const auto b = static_cast<NodeId>(std::max(r.u, r.v));
    edges.push_back({a, b, w});
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.u < y.u || (x.u == y.u && x.v < y.v);
  });
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const Edge& e : edges) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      merged.back().w += e.w;
    } else {
      merged.push_back(e);
    }
  }
  return WeightedGraph::from_canonical(n, std::move(merged));
}

double laplacian_quadratic_form(const WeightedGraph& g, std::span<const double> x) {
  if (x.size() != g.num_nodes()) throw InputError("vector length does not match node count");
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = x[e.u] - x[e.v];
    total += e.w * d * d;
  }
  return total;
}

void laplacian_apply(const WeightedGraph& g, std::span<const double> x, std::span<double> y) {
  if (x.size() != g.num_nodes() || y.size() != g.num_nodes()) {
    throw InputError("vector length does not match node count");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (const Edge& e : g.edges()) {
    const double f = e.w * (x[e.u] - x[e.v]);
    y[e.u] += f;
    y[e.v] -= f;
  }
}

std::vector<double> weighted_degrees(const WeightedGraph& g) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (const Edge& e : g.edges()) {
    d[e.u] += e.w;
    d[e.v] += e.w;
  }
  return d;
}

std::vector<std::size_t> unweighted_degrees(const WeightedGraph& g) {
  std::vector<std::size_t> d(g.num_nodes());
  for (std::size_t v = 0; v < g.num_nodes(); ++v) d[v] = g.degree(static_cast<NodeId>(v));
  return d;
}

double total_edge_weight(const WeightedGraph& g) {
  double total = 0.0;
  for (const Edge& e : g.edges()) total += e.w;
  return total;
}

std::vector<std::vector<NodeId>> ComponentLabeling::members() const {
  std::vector<std::vector<NodeId>> out(count);
  for (std::size_t v = 0; v < component.size(); ++v) {
    out[component[v]].push_back(static_cast<NodeId>(v));
  }
  return out;
}

ComponentLabeling connected_components(const WeightedGraph& g) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  ComponentLabeling out;
  out.component.assign(g.num_nodes(), unset);
  std::queue<NodeId> frontier;
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    if (out.component[s] != unset) continue;
    out.component[s] = out.count;
    frontier.push(static_cast<NodeId>(s));
    while (!frontier.empty()) {
      const NodeId v = frontier.front();
      frontier.pop();
      for (const Neighbor& nb : g.neighbors(v)) {
        if (out.component[nb.node] == unset) {
          out.component[nb.node] = out.count;
          frontier.push(nb.node);
        }
      }
    }
    ++out.count;
  }
  return out;
}

Subgraph induced_subgraph(const WeightedGraph& g, std::span<const NodeId> nodes) {
  constexpr auto absent = static_cast<NodeId>(-1);
  std::vector<NodeId> local(g.num_nodes(), absent);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.num_nodes()) throw InputError("subgraph node id out of range");
    if (local[nodes[i]] != absent) throw InputError("subgraph node list has duplicates");
    local[nodes[i]] = static_cast<NodeId>(i);
  }
  std::vector<RawEdge> raw;
  for (const Edge& e : g.edges()) {
    if (local[e.u] != absent && local[e.v] != absent) {
      raw.push_back({local[e.u], local[e.v], e.w});
    }
  }
  return {build_graph(raw, nodes.size()), std::vector<NodeId>(nodes.begin(), nodes.end())};
}

WeightedGraph merge_subgraphs(std::size_t n, std::span<const Subgraph> parts) {
  std::vector<RawEdge> raw;
  for (const Subgraph& part : parts) {
    for (const Edge& e : part.graph.edges()) {
      raw.push_back({part.to_parent.at(e.u), part.to_parent.at(e.v), e.w});
    }
  }
  return build_graph(raw, n);
}

}  // namespace dsr
