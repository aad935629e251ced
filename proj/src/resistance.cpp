#include "dsr/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>

#include "dsr/error.hpp"
#include "dsr/linalg.hpp"
#include "dsr/random.hpp"

namespace dsr {

std::size_t sketch_dimension(std::size_t n, const SketchOptions& options) {
  if (options.dimension) return std::max<std::size_t>(1, *options.dimension);
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  const double logn = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return static_cast<std::size_t>(std::ceil(options.constant * logn / (options.delta * options.delta)));
}

ResistanceOracle ResistanceOracle::exact(const WeightedGraph& g, std::size_t dense_cap) {
  ResistanceOracle oracle;
  oracle.graph_ = g;
  oracle.method_ = ResistanceMethod::Exact;
  const ComponentLabeling labels = connected_components(g);
  oracle.component_ = labels.component;
  oracle.local_.assign(g.num_nodes(), 0);
  oracle.blocks_.resize(labels.count);
  const auto members = labels.members();
  for (std::size_t c = 0; c < labels.count; ++c) {
    Block& block = oracle.blocks_[c];
    block.nodes = members[c];
    for (std::size_t i = 0; i < block.nodes.size(); ++i) oracle.local_[block.nodes[i]] = i;
    if (block.nodes.size() < 2) continue;
    if (block.nodes.size() > dense_cap) {
      throw InputError("component of " + std::to_string(block.nodes.size()) +
                       " nodes exceeds the exact resistance cap of " + std::to_string(dense_cap));
    }
    block.data = linalg::laplacian_pseudoinverse(induced_subgraph(g, block.nodes).graph);
  }
  return oracle;
}

ResistanceOracle ResistanceOracle::sketch(const WeightedGraph& g, const SketchOptions& options) {
  ResistanceOracle oracle;
  oracle.graph_ = g;
  oracle.method_ = ResistanceMethod::Approx;
  oracle.delta_ = options.delta;
  const ComponentLabeling labels = connected_components(g);
  oracle.component_ = labels.component;
  oracle.local_.assign(g.num_nodes(), 0);
  oracle.blocks_.resize(labels.count);
  const auto members = labels.members();
  const std::size_t workers = linalg::thread_count();

  for (std::size_t c = 0; c < labels.count; ++c) {
    Block& block = oracle.blocks_[c];
    block.nodes = members[c];
    for (std::size_t i = 0; i < block.nodes.size(); ++i) oracle.local_[block.nodes[i]] = i;
    if (block.nodes.size() < 2) continue;

    const WeightedGraph sub = induced_subgraph(g, block.nodes).graph;
    const std::size_t n = sub.num_nodes();
    const std::size_t k = sketch_dimension(n, options);
    oracle.dimension_ = std::max(oracle.dimension_, k);
    block.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
    std::vector<double> scale(sub.num_edges());
    for (std::size_t e = 0; e < sub.num_edges(); ++e) {
      scale[e] = std::sqrt(sub.edges()[e].w) * inv_sqrt_k;
    }
    const std::uint64_t component_seed = derive_seed(options.seed, "er-sketch-component", c);

    std::vector<double> worst(workers, 0.0);
    std::vector<char> ok(workers, 1);
    const auto run = [&](std::size_t worker) {
      linalg::LaplacianSolver solver(sub, options.solver_tolerance);
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
      for (std::size_t row = worker; row < k; row += workers) {
        // Row `row` of Q W^{1/2} B, as an n-vector: B^T W^{1/2} q_row.
        Rng rng = make_rng(component_seed, "er-sketch-row", row);
        rhs.setZero();
        for (std::size_t e = 0; e < sub.num_edges(); ++e) {
          const Edge& edge = sub.edges()[e];
          const double s = (rng() & 1ULL) ? scale[e] : -scale[e];
          rhs(edge.u) += s;
          rhs(edge.v) -= s;
        }
        auto result = solver.solve(rhs);
        worst[worker] = std::max(worst[worker], result.relative_residual);
        if (!result.converged) ok[worker] = 0;
        block.data.col(static_cast<Eigen::Index>(row)) = result.x;
      }
    };
    if (workers <= 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(run, t);
      for (auto& t : threads) t.join();
    }
    for (std::size_t t = 0; t < workers; ++t) {
      oracle.max_residual_ = std::max(oracle.max_residual_, worst[t]);
      if (!ok[t]) oracle.converged_ = false;
    }
  }
  return oracle;
}

bool ResistanceOracle::same_component(NodeId u, NodeId v) const {
  if (u >= component_.size() || v >= component_.size()) throw InputError("node id out of range");
  return component_[u] == component_[v];
}

double ResistanceOracle::pair(NodeId u, NodeId v) const {
  if (u == v) throw InputError("resistance pair needs two distinct nodes");
  if (!same_component(u, v)) {
    throw InputError("nodes " + std::to_string(u) + " and " + std::to_string(v) +
                     " lie in different components (infinite resistance)");
  }
  const Block& block = blocks_[component_[u]];
  const auto a = static_cast<Eigen::Index>(local_[u]);
  const auto b = static_cast<Eigen::Index>(local_[v]);
  if (method_ == ResistanceMethod::Exact) {
    return block.data(a, a) + block.data(b, b) - 2.0 * block.data(a, b);
  }
  return (block.data.row(a) - block.data.row(b)).squaredNorm();
}

ResistanceTable ResistanceOracle::edge_table() const {
  ResistanceTable table;
  table.method = method_;
  table.delta = method_ == ResistanceMethod::Exact ? 0.0 : delta_;
  table.effective_delta = 1.1 * table.delta;
  table.sketch_dimension = dimension_;
  table.max_solver_residual = max_residual_;
  table.converged = converged_;
  table.values.reserve(graph_.num_edges());
  for (const Edge& e : graph_.edges()) table.values.push_back(pair(e.u, e.v));
  return table;
}

ResistanceTable effective_resistance_exact(const WeightedGraph& g, std::size_t dense_cap) {
  return ResistanceOracle::exact(g, dense_cap).edge_table();
}

double effective_resistance_pair(const WeightedGraph& g, NodeId u, NodeId v,
                                 std::size_t dense_cap) {
  if (u >= g.num_nodes() || v >= g.num_nodes()) throw InputError("node id out of range");
  if (u == v) throw InputError("resistance pair needs two distinct nodes");
  const ComponentLabeling labels = connected_components(g);
  if (labels.component[u] != labels.component[v]) {
    throw InputError("nodes " + std::to_string(u) + " and " + std::to_string(v) +
                     " lie in different components (infinite resistance)");
  }
  std::vector<NodeId> nodes;
  for (std::size_t x = 0; x < g.num_nodes(); ++x) {
    if (labels.component[x] == labels.component[u]) nodes.push_back(static_cast<NodeId>(x));
  }
  const Subgraph sub = induced_subgraph(g, nodes);
  const auto local = [&](NodeId x) {
    return static_cast<Eigen::Index>(std::lower_bound(nodes.begin(), nodes.end(), x) - nodes.begin());
  };
  const Eigen::Index a = local(u);
  const Eigen::Index b = local(v);
  if (nodes.size() <= dense_cap) {
    const Eigen::MatrixXd P = linalg::laplacian_pseudoinverse(sub.graph);
    return P(a, a) + P(b, b) - 2.0 * P(a, b);
  }
  linalg::LaplacianSolver solver(sub.graph, 1e-12);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
  rhs(a) = 1.0;
  rhs(b) = -1.0;
  const auto result = solver.solve(rhs);
  if (!result.converged) throw NumericError("conjugate gradient did not converge for pair query");
  return result.x(a) - result.x(b);
}

ResistanceTable effective_resistance_approx(const WeightedGraph& g, const SketchOptions& options) {
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  return ResistanceOracle::sketch(g, options).edge_table();
}

std::vector<PairResistance> er_pair_sample(const WeightedGraph& g, const ResistanceOracle& oracle,
                                           std::size_t num_pairs, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  if (num_pairs > total) throw InputError("more pairs requested than the graph has");
  if (num_pairs > 0 && connected_components(g).count != 1) {
    throw InputError("pair sampling needs a connected graph");
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(num_pairs);
  if (2 * num_pairs >= total) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    }
    Rng rng = make_rng(seed, "er-pair-sample");
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(num_pairs);
  } else {
    Rng rng = make_rng(seed, "er-pair-sample");
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::unordered_set<std::uint64_t> seen;
    while (pairs.size() < num_pairs) {
      auto u = static_cast<NodeId>(pick(rng));
      auto v = static_cast<NodeId>(pick(rng));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) pairs.emplace_back(u, v);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<PairResistance> out;
  out.reserve(pairs.size());
  for (const auto& [u, v] : pairs) out.push_back({u, v, oracle.pair(u, v)});
  return out;
}

}  // namespace dsr

namespace dsr {

namespace {

// Pair values under the L^+ formula. Cross-component pairs get
// L^+_uu + L^+_vv when `cross_finite`, +infinity otherwise.
std::vector<double> pair_values(const WeightedGraph& g,
                                std::span<const std::pair<NodeId, NodeId>> pairs,
                                std::size_t dense_cap, bool cross_finite) {
  const ComponentLabeling labels = connected_components(g);
  const auto members = labels.members();
  std::vector<double> out(pairs.size(), 0.0);
  // Per component: pairs inside it, and single endpoints of cross pairs.
  std::vector<std::vector<std::size_t>> inside(labels.count);
  std::vector<std::vector<std::pair<std::size_t, NodeId>>> diagonal(labels.count);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [u, v] = pairs[i];
    if (u >= g.num_nodes() || v >= g.num_nodes()) throw InputError("node id out of range");
    if (u == v) throw InputError("resistance pair needs two distinct nodes");
    if (labels.component[u] == labels.component[v]) {
      inside[labels.component[u]].push_back(i);
    } else if (cross_finite) {
      diagonal[labels.component[u]].emplace_back(i, u);
      diagonal[labels.component[v]].emplace_back(i, v);
    } else {
      out[i] = std::numeric_limits<double>::infinity();
    }
  }
  for (std::size_t c = 0; c < labels.count; ++c) {
    if (inside[c].empty() && diagonal[c].empty()) continue;
    const std::vector<NodeId>& nodes = members[c];
    if (nodes.size() < 2) continue;  // L^+ of a single node is 0
    const WeightedGraph sub = induced_subgraph(g, nodes).graph;
    const auto local = [&](NodeId x) {
      return static_cast<Eigen::Index>(std::lower_bound(nodes.begin(), nodes.end(), x) -
                                       nodes.begin());
    };
    if (nodes.size() <= dense_cap) {
      const Eigen::MatrixXd P = linalg::laplacian_pseudoinverse(sub);
      for (std::size_t i : inside[c]) {
        const Eigen::Index a = local(pairs[i].first);
        const Eigen::Index b = local(pairs[i].second);
        out[i] = P(a, a) + P(b, b) - 2.0 * P(a, b);
      }
      for (const auto& [i, x] : diagonal[c]) out[i] += P(local(x), local(x));
      continue;
    }
    linalg::LaplacianSolver solver(sub, 1e-10);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
    const auto solve = [&](Eigen::Index a, Eigen::Index b) {
      rhs.setZero();
      rhs(a) = 1.0;
      if (b >= 0) rhs(b) = -1.0;
      auto result = solver.solve(rhs);
      if (!result.converged) throw NumericError("conjugate gradient did not converge for pair query");
      return result.x;
    };
    for (std::size_t i : inside[c]) {
      const Eigen::Index a = local(pairs[i].first);
      const Eigen::Index b = local(pairs[i].second);
      const Eigen::VectorXd x = solve(a, b);
      out[i] = x(a) - x(b);
    }
    for (const auto& [i, node] : diagonal[c]) {
      const Eigen::Index a = local(node);
      out[i] += solve(a, -1)(a);
    }
  }
  return out;
}

}  // namespace

std::vector<double> effective_resistance_pairs(const WeightedGraph& g,
                                               std::span<const std::pair<NodeId, NodeId>> pairs,
                                               std::size_t dense_cap) {
  return pair_values(g, pairs, dense_cap, false);
}

std::vector<double> pseudoinverse_pair_values(const WeightedGraph& g,
                                              std::span<const std::pair<NodeId, NodeId>> pairs,
                                              std::size_t dense_cap) {
  return pair_values(g, pairs, dense_cap, true);
}

std::vector<std::pair<NodeId, NodeId>> sample_connected_pairs(const WeightedGraph& g,
                                                              std::size_t count,
                                                              std::uint64_t seed) {
  const ComponentLabeling labels = connected_components(g);
  const auto members = labels.members();
  std::size_t total = 0;
  for (const auto& nodes : members) total += nodes.size() * (nodes.size() - 1) / 2;

  Rng rng = make_rng(seed, "connected-pairs");
  std::vector<std::pair<NodeId, NodeId>> pairs;
  if (count == 0 || total == 0) return pairs;
  if (2 * count >= total) {
    for (const auto& nodes : members) {
      for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) pairs.emplace_back(nodes[a], nodes[b]);
      }
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    if (pairs.size() > count) pairs.resize(count);
  } else {
    // Pick a component with probability proportional to its pair count, then
    // a uniform pair inside it: uniform over all same-component pairs.
    std::vector<double> weight;
    for (const auto& nodes : members) {
      weight.push_back(static_cast<double>(nodes.size() * (nodes.size() - 1) / 2));
    }
    std::discrete_distribution<std::size_t> pick_component(weight.begin(), weight.end());
    std::unordered_set<std::uint64_t> seen;
    while (pairs.size() < count) {
      const auto& nodes = members[pick_component(rng)];
      std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
      NodeId u = nodes[pick(rng)];
      NodeId v = nodes[pick(rng)];
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) pairs.emplace_back(u, v);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace dsr
