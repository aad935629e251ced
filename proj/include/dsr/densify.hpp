#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dsr/error.hpp"
#include "dsr/graph.hpp"
#include "dsr/sampler.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

/// Sizing decisions for one densification run.
struct DensifyPlan {
  double kappa = 0.0;
  double q = 0.0;  // integral; may exceed 2^64 for badly conditioned probes
  double latent_size_real = 0.0;
  bool latent_unbounded = false;  // q <= m: no finite latent size exists
  std::size_t k = 0;
  double epsilon_used = 0.0;
  std::size_t escalations = 0;
  bool threshold_met = true;
};

struct CandidateSet {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<double> log_scores;  // log c_e before normalization
  std::vector<double> scores;      // c_e normalized to sum to 1
  std::vector<NodeId> source_nodes;
  std::size_t j = 0;
};

/// kappa(x) = ||Cx||_inf^2 / (p_min ||Cx||_2^2) with the unit-weight
/// incidence matrix, one row per edge.
double condition_number(const WeightedGraph& g, const EigenPair& probe,
                        const EdgeDistribution& dist);

/// ceil(kappa^2 / (2 epsilon^2) * ln 8) for kappa > 0 and epsilon in (0, 1).
/// Throws InputError outside that domain and when the count does not fit.
std::uint64_t sampling_count(double kappa, double epsilon);

/// Root x >= m of x (1 - (1 - 1/x)^q) = m: the latent edge count whose q
/// uniform draws show m distinct edges in expectation. Requires q > m >= 1.
double latent_size(double q, std::size_t m);

/// Smallest j with C(j, 2) >= k.
std::size_t candidate_group_size(std::size_t k);

/// Non-edges among the 2j largest-|f| nodes and the 2j lowest-degree nodes,
/// growing j until at least k pairs are available. Throws InputError when
/// even the full node set has fewer than k non-edges.
CandidateSet candidate_edges(const WeightedGraph& g, std::size_t k, const EigenPair& fiedler);

/// Fills log_scores/scores with each candidate's own factor of the
/// densification likelihood, ((1 - p_e')^q)^{mean weight}, where p_e' is the
/// candidate's USS probability with the existing-edge mass held fixed.
void candidate_scores(const WeightedGraph& g, CandidateSet& candidates, const EigenPair& fiedler,
                      const EdgeDistribution& uss, double q, const UssOptions& options = {});

/// Same output fields as candidate_scores, but each candidate is scored by
/// the whole log-likelihood of G plus that candidate: every existing edge's
/// factor is recomputed with the candidate's score in the normalizer and the
/// endpoint degrees bumped. O(|E|) per candidate; the Fiedler vector of g is
/// held fixed.
void candidate_scores_full(const WeightedGraph& g, CandidateSet& candidates,
                           const EigenPair& fiedler, double q, const UssOptions& options = {});

enum class CandidateScoring { Frozen, Full };

enum class LatentWeights {
  Uniform,     // every latent edge weighs total_weight(G) / |E_l|
  Pseudocode,  // original edges scaled by |E|/|E_l|, added edges by accumulated 1/p over r
};

struct DensifyOptions {
  double epsilon0 = 0.1;
  double growth = 1.25;
  std::optional<double> epsilon_cap;  // unset: escalate until the threshold is met
  bool refine = true;                 // bisect epsilon once the threshold is bracketed
  std::size_t max_escalations = 1000;
  LatentWeights weights = LatentWeights::Uniform;
  CandidateScoring scoring = CandidateScoring::Frozen;
  UssOptions uss;
};

struct DensifyResult {
  WeightedGraph latent;
  DensifyPlan plan;
  std::vector<std::pair<NodeId, NodeId>> added;
  std::vector<SoftFailure> soft_failures;
};

/// Plan for a connected graph given its USS distribution and leading pair.
DensifyPlan plan_densification(const WeightedGraph& g, const EdgeDistribution& uss,
                               const EigenPair& leading, std::size_t alpha,
                               const DensifyOptions& options,
                               std::vector<SoftFailure>* soft_failures = nullptr);

/// Densifies a connected graph with at least one edge.
DensifyResult densify_connected(const WeightedGraph& g, std::size_t alpha,
                                const DensifyOptions& options, std::uint64_t seed);

/// Densifies each component separately; alpha is split across components in
/// proportion to their edge counts.
DensifyResult densify(const WeightedGraph& g, std::size_t alpha, const DensifyOptions& options,
                      std::uint64_t seed);

/// Per-component share of alpha, proportional to edge counts. Components
/// without a free pair get nothing; every other component gets at least 1.
std::vector<std::size_t> apportion_alpha(std::size_t alpha, std::span<const std::size_t> edges,
                                         std::span<const std::size_t> non_edges);

}  // namespace dsr
