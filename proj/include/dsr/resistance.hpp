#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dsr/graph.hpp"

namespace dsr {

enum class ResistanceMethod { Exact, Approx };

/// Per-edge effective resistance aligned with WeightedGraph::edges().
struct ResistanceTable {
  std::vector<double> values;
  ResistanceMethod method = ResistanceMethod::Exact;
  double delta = 0.0;            // requested error, 0 for exact
  double effective_delta = 0.0;  // 1.1 * delta, the error callers should assume
  std::size_t sketch_dimension = 0;
  double max_solver_residual = 0.0;
  bool converged = true;
};

struct SketchOptions {
  double delta = 0.1;
  double constant = 4.0;  // sketch rows k = ceil(constant * ln n / delta^2)
  std::optional<std::size_t> dimension;  // overrides the formula when set
  double solver_tolerance = 1e-8;
  std::uint64_t seed = 0;
};

std::size_t sketch_dimension(std::size_t n, const SketchOptions& options);

/// Answers effective-resistance queries on a graph, component by component.
/// Exact mode keeps a dense L^+ per component; sketch mode keeps the
/// Johnson-Lindenstrauss embedding Z = Q W^{1/2} B L^+ per component.
class ResistanceOracle {
 public:
  static ResistanceOracle exact(const WeightedGraph& g, std::size_t dense_cap = 2000);
  static ResistanceOracle sketch(const WeightedGraph& g, const SketchOptions& options);

  /// R_{u,v}; throws InputError for u == v or nodes in different components.
  double pair(NodeId u, NodeId v) const;
  bool same_component(NodeId u, NodeId v) const;

  /// Per-edge table for the graph the oracle was built from.
  ResistanceTable edge_table() const;

  ResistanceMethod method() const { return method_; }

 private:
  ResistanceOracle() = default;

  struct Block {
    std::vector<NodeId> nodes;
    Eigen::MatrixXd data;  // exact: L^+ (n_c x n_c); sketch: Z^T (n_c x k)
  };

  WeightedGraph graph_;
  ResistanceMethod method_ = ResistanceMethod::Exact;
  double delta_ = 0.0;
  std::size_t dimension_ = 0;
  double max_residual_ = 0.0;
  bool converged_ = true;
  std::vector<std::size_t> component_;
  std::vector<std::size_t> local_;
  std::vector<Block> blocks_;  // indexed by component id; singletons stay empty
};

/// Exact per-edge ER through a dense pseudoinverse of each component.
ResistanceTable effective_resistance_exact(const WeightedGraph& g, std::size_t dense_cap = 2000);

/// Exact R_{u,v}.
double effective_resistance_pair(const WeightedGraph& g, NodeId u, NodeId v,
                                 std::size_t dense_cap = 2000);

/// Exact R for each (u, v) pair, +infinity for pairs in different
/// components. Components up to `dense_cap` nodes use a dense L^+, larger
/// ones one conjugate-gradient solve per pair at relative tolerance 1e-10.
std::vector<double> effective_resistance_pairs(const WeightedGraph& g,
                                               std::span<const std::pair<NodeId, NodeId>> pairs,
                                               std::size_t dense_cap = 500);

/// (e_u - e_v)^T L^+ (e_u - e_v) for every pair, including pairs in
/// different components, where it reduces to L^+_uu + L^+_vv. Always finite.
std::vector<double> pseudoinverse_pair_values(const WeightedGraph& g,
                                              std::span<const std::pair<NodeId, NodeId>> pairs,
                                              std::size_t dense_cap = 500);

/// Sketched per-edge ER, deterministic per seed.
ResistanceTable effective_resistance_approx(const WeightedGraph& g, const SketchOptions& options);

struct PairResistance {
  NodeId u = 0;
  NodeId v = 0;
  double r = 0.0;
};

/// `count` distinct pairs (u < v) drawn uniformly from the pairs that share
/// a component, ordered by (u, v). Returns every such pair when there are
/// fewer than `count`.
std::vector<std::pair<NodeId, NodeId>> sample_connected_pairs(const WeightedGraph& g,
                                                              std::size_t count,
                                                              std::uint64_t seed);

/// Uniformly sampled distinct node pairs (u < v) of a connected graph with
/// their resistance from `oracle`, ordered by (u, v).
std::vector<PairResistance> er_pair_sample(const WeightedGraph& g, const ResistanceOracle& oracle,
                                           std::size_t num_pairs, std::uint64_t seed);

}  // namespace dsr
