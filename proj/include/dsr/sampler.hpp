#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsr/graph.hpp"
#include "dsr/node_data.hpp"
#include "dsr/resistance.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

/// Normalized per-edge sampling probabilities, p_e proportional to score s_e.
struct EdgeDistribution {
  std::vector<double> probabilities;
  std::vector<double> scores;

  /// Throws InputError unless every score is positive and finite.
  static EdgeDistribution from_scores(std::vector<double> scores);
  double min_probability() const;
  std::size_t size() const { return probabilities.size(); }
};

enum class StopReason { FixedCount, TargetReached, CapExhausted };

struct SparsifyOutcome {
  WeightedGraph graph;
  std::uint64_t q_used = 0;
  std::size_t distinct_edges = 0;
  std::vector<std::uint64_t> hits;  // aligned with the input graph's edges
  StopReason stop = StopReason::FixedCount;
};

/// q independent draws with replacement; every hit on e adds w_e / (q p_e).
/// Hit counts are drawn as a multinomial (sequential conditional binomials),
/// so the cost is O(m) regardless of q.
SparsifyOutcome sample_sparsifier(const WeightedGraph& g, const EdgeDistribution& dist,
                                  std::uint64_t q, std::uint64_t seed);

enum class DegreeConvention { Unweighted, Weighted };

struct UssOptions {
  DegreeConvention degrees = DegreeConvention::Unweighted;
  double fiedler_floor = 1e-12;
  EigenOptions eigen;
};

/// (deg u + deg v + 1) / max(|f_u - f_v|, floor).
double uss_score(double deg_u, double deg_v, double f_u, double f_v, double floor);

EdgeDistribution uss_probabilities(const WeightedGraph& g, const UssOptions& options = {});
/// Same, with a precomputed Fiedler vector of g.
EdgeDistribution uss_probabilities(const WeightedGraph& g, const EigenPair& fiedler,
                                   const UssOptions& options = {});

SparsifyOutcome uss_sparsify(const WeightedGraph& g, std::uint64_t q, std::uint64_t seed,
                             const UssOptions& options = {});

/// (1 + cos(a, b)) / 2, or 0.5 when either vector has zero norm.
double feature_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// p_e proportional to (1 + S_e) R_e. Without features every S_e is 0.5.
EdgeDistribution iss_probabilities(const WeightedGraph& g, const NodeFeatures* features,
                                   const ResistanceTable& resistances);

/// 50 |E| ln(|E| + 2).
std::uint64_t default_q_cap(std::size_t num_edges);

/// Draws one edge at a time until `target_distinct` distinct edges have been
/// hit or `q_cap` draws were made. Each hit adds w_e / p_e and the totals are
/// divided by the realized draw count at the end.
SparsifyOutcome iss_sparsify(const WeightedGraph& g, const EdgeDistribution& dist,
                             std::size_t target_distinct, std::uint64_t q_cap,
                             std::uint64_t seed);

/// Convenience overload computing the ISS distribution first.
SparsifyOutcome iss_sparsify(const WeightedGraph& g, const NodeFeatures* features,
                             const ResistanceTable& resistances, std::size_t target_distinct,
                             std::uint64_t q_cap, std::uint64_t seed);

}  // namespace dsr
