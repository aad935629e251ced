#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dsr/densify.hpp"
#include "dsr/error.hpp"
#include "dsr/graph.hpp"
#include "dsr/metrics.hpp"
#include "dsr/node_data.hpp"
#include "dsr/resistance.hpp"
#include "dsr/sampler.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

enum class ErMode { Exact, Approx, Auto };

struct MetricsOptions {
  bool enabled = true;
  bool spectra = true;          // full spectra when n <= dense_cap
  std::size_t er_pairs = 200;   // sampled same-component pairs for mean ER
};

struct RewiringConfig {
  std::size_t alpha = 0;                 // absolute densification threshold
  std::optional<double> alpha_fraction;  // alpha = round(fraction * |E|) when set
  double beta = 1.0;
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::size_t dense_cap = 2000;
  ErMode er_mode = ErMode::Auto;
  LatentWeights weight_variant = LatentWeights::Uniform;
  CandidateScoring scoring = CandidateScoring::Frozen;
  std::optional<double> epsilon_cap;
  MetricsOptions metrics;

  /// Throws InputError when a field is out of range.
  void validate() const;
  std::size_t alpha_for(std::size_t num_edges) const;
};

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double total_weight = 0.0;
  std::size_t components = 0;
};

GraphSummary summarize(const WeightedGraph& g);

/// What happened to one connected component of the input.
struct ComponentRecord {
  std::size_t id = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool bypassed = false;  // fewer than two nodes: passed through untouched

  std::size_t alpha = 0;
  DensifyPlan plan;
  std::size_t added = 0;

  std::size_t target = 0;
  std::size_t distinct_out = 0;
  std::uint64_t draws = 0;
  StopReason stop = StopReason::TargetReached;
  ResistanceMethod er_method = ResistanceMethod::Exact;
  std::size_t sketch_dimension = 0;
};

struct MetricSet {
  std::optional<double> homophily;
  double spectral_gap = 0.0;
  std::optional<double> mean_pair_er;  // unset when a sampled pair is disconnected
  std::size_t disconnected_pairs = 0;
  std::optional<double> mean_pair_er_pinv;  // L^+ formula, finite across components
  std::optional<ErSummary> er_summary;
  std::optional<SpectrumSummary> spectrum;
};

struct StageTimings {
  double densify_seconds = 0.0;
  double sparsify_seconds = 0.0;
  double metrics_seconds = 0.0;
  double total_seconds = 0.0;
};

struct RewiringReport {
  RewiringConfig config;
  std::size_t alpha_total = 0;
  GraphSummary input;
  GraphSummary latent;
  GraphSummary output;
  DensifyPlan plan;  // component maxima for kappa, q, epsilon; sums for k and latent size
  std::vector<ComponentRecord> components;

  std::optional<MetricSet> before;
  std::optional<MetricSet> after;
  std::optional<double> spectral_distance;
  std::vector<std::pair<NodeId, NodeId>> er_pairs;
  std::vector<double> er_pairs_before;
  std::vector<double> er_pairs_after;

  std::vector<SoftFailure> soft_failures;
  StageTimings timings;  // excluded from determinism comparisons
};

struct DensifyStage {
  WeightedGraph latent;
  std::vector<ComponentRecord> components;
  std::vector<std::pair<NodeId, NodeId>> added;
  std::vector<SoftFailure> soft_failures;
};

/// Densifies every component with at least one edge; alpha is apportioned
/// by edge count.
DensifyStage densify_stage(const WeightedGraph& g, std::size_t alpha, const RewiringConfig& cfg);

struct SparsifyStage {
  WeightedGraph output;
  std::vector<ComponentRecord> components;  // sparsification fields only
  std::vector<SoftFailure> soft_failures;
};

/// max(1, round(beta * m)).
std::size_t sparsify_target(double beta, std::size_t num_edges);

/// ISS on every component of `g`. `targets[c]` is the distinct-edge target
/// of component c; when empty, targets are sparsify_target(beta, m_c).
SparsifyStage sparsify_stage(const WeightedGraph& g, const NodeFeatures* features,
                             const RewiringConfig& cfg, std::span<const std::size_t> targets = {});

/// Metrics of one graph; `pairs` are the node pairs for the mean ER.
MetricSet compute_metrics(const WeightedGraph& g, const LabelVector* labels,
                          std::span<const std::pair<NodeId, NodeId>> pairs,
                          std::vector<double>* pair_values, const RewiringConfig& cfg);

struct RewiringResult {
  WeightedGraph graph;
  WeightedGraph latent;
  RewiringReport report;
};

/// Densification followed by importance-based sparsification, per component.
RewiringResult rewire(const WeightedGraph& g, const NodeFeatures* features,
                      const LabelVector* labels, const RewiringConfig& cfg);

/// g plus k uniformly random non-edges at unit weight.
WeightedGraph random_addition_baseline(const WeightedGraph& g, std::size_t k, std::uint64_t seed);

}  // namespace dsr
