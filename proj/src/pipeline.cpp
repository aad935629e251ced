#include "dsr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>

#include "dsr/random.hpp"

namespace dsr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t component_seed(std::uint64_t seed, std::size_t c) {
  return derive_seed(seed, "component", c);
}

}  // namespace

void RewiringConfig::validate() const {
  if (alpha_fraction && !(*alpha_fraction >= 0.0 && std::isfinite(*alpha_fraction))) {
    throw InputError("alpha fraction must be finite and >= 0");
  }
  if (!(beta > 0.5 && beta <= 1.0)) throw InputError("beta must lie in (0.5, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (epsilon_cap && !(*epsilon_cap >= epsilon)) throw InputError("epsilon cap must be >= epsilon");
  if (dense_cap < 2) throw InputError("dense cap must be at least 2");
}

std::size_t RewiringConfig::alpha_for(std::size_t num_edges) const {
  if (!alpha_fraction) return alpha;
  return static_cast<std::size_t>(std::llround(*alpha_fraction * static_cast<double>(num_edges)));
}

GraphSummary summarize(const WeightedGraph& g) {
  return {g.num_nodes(), g.num_edges(), total_edge_weight(g), connected_components(g).count};
}

DensifyStage densify_stage(const WeightedGraph& g, std::size_t alpha, const RewiringConfig& cfg) {
  cfg.validate();
  const ComponentLabeling labels = connected_components(g);
  const auto members = labels.members();

  std::vector<Subgraph> parts;
  std::vector<std::size_t> edges;
  std::vector<std::size_t> free_pairs;
  for (const auto& nodes : members) {
    parts.push_back(induced_subgraph(g, nodes));
    const WeightedGraph& sub = parts.back().graph;
    edges.push_back(sub.num_edges());
    free_pairs.push_back(sub.num_nodes() * (sub.num_nodes() - 1) / 2 - sub.num_edges());
  }
  const auto share = apportion_alpha(alpha, edges, free_pairs);

  DensifyOptions options;
  options.epsilon0 = cfg.epsilon;
  options.epsilon_cap = cfg.epsilon_cap;
  options.weights = cfg.weight_variant;
  options.scoring = cfg.scoring;

  DensifyStage stage;
  std::vector<Subgraph> latent_parts;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    ComponentRecord rec;
    rec.id = c;
    rec.nodes = parts[c].graph.num_nodes();
    rec.edges = parts[c].graph.num_edges();
    rec.alpha = share[c];
    if (rec.nodes < 2) {
      rec.bypassed = true;
      stage.components.push_back(rec);
      latent_parts.push_back(parts[c]);
      continue;
    }
    DensifyResult result = densify_connected(parts[c].graph, share[c], options,
                                             derive_seed(component_seed(cfg.seed, c), "densify"));
    rec.plan = result.plan;
    rec.added = result.added.size();
    for (auto& f : result.soft_failures) {
      stage.soft_failures.push_back({f.stage, "component " + std::to_string(c) + ": " + f.message});
    }
    for (const auto& [u, v] : result.added) {
      NodeId a = parts[c].to_parent[u];
      NodeId b = parts[c].to_parent[v];
      if (a > b) std::swap(a, b);
      stage.added.emplace_back(a, b);
    }
    stage.components.push_back(rec);
    latent_parts.push_back({std::move(result.latent), parts[c].to_parent});
  }
  std::sort(stage.added.begin(), stage.added.end());
  stage.latent = merge_subgraphs(g.num_nodes(), latent_parts);
  return stage;
}

std::size_t sparsify_target(double beta, std::size_t num_edges) {
  const auto t = static_cast<std::size_t>(std::llround(beta * static_cast<double>(num_edges)));
  return std::max<std::size_t>(1, t);
}

SparsifyStage sparsify_stage(const WeightedGraph& g, const NodeFeatures* features,
                             const RewiringConfig& cfg, std::span<const std::size_t> targets) {
  cfg.validate();
  if (features != nullptr && features->num_nodes() != g.num_nodes()) {
    throw InputError("feature matrix has " + std::to_string(features->num_nodes()) +
                     " rows for " + std::to_string(g.num_nodes()) + " nodes");
  }
  const ComponentLabeling labels = connected_components(g);
  if (!targets.empty() && targets.size() != labels.count) {
    throw InputError("sparsification targets do not match the component count");
  }
  const auto members = labels.members();

  SparsifyStage stage;
  std::vector<Subgraph> out_parts;
  for (std::size_t c = 0; c < labels.count; ++c) {
    Subgraph part = induced_subgraph(g, members[c]);
    ComponentRecord rec;
    rec.id = c;
    rec.nodes = part.graph.num_nodes();
    rec.edges = part.graph.num_edges();
    if (rec.nodes < 2) {
      rec.bypassed = true;
      stage.components.push_back(rec);
      out_parts.push_back(std::move(part));
      continue;
    }
    rec.target = targets.empty() ? sparsify_target(cfg.beta, rec.edges)
                                 : std::min(targets[c], rec.edges);
    const std::uint64_t seed = component_seed(cfg.seed, c);

    const bool exact = cfg.er_mode == ErMode::Exact ||
                       (cfg.er_mode == ErMode::Auto && rec.nodes <= cfg.dense_cap);
    ResistanceTable table;
    if (exact) {
      table = effective_resistance_exact(part.graph, std::max(cfg.dense_cap, rec.nodes));
    } else {
      SketchOptions sketch;
      sketch.delta = cfg.delta;
      sketch.seed = derive_seed(seed, "resistance");
      table = effective_resistance_approx(part.graph, sketch);
      if (!table.converged) {
        stage.soft_failures.push_back(
            {"resistance", "component " + std::to_string(c) + ": sketch solves did not converge"});
      }
    }
    rec.er_method = table.method;
    rec.sketch_dimension = table.sketch_dimension;

    NodeFeatures local_features;
    const NodeFeatures* feature_view = nullptr;
    if (features != nullptr) {
      local_features.rows.resize(static_cast<Eigen::Index>(rec.nodes), features->rows.cols());
      for (std::size_t i = 0; i < rec.nodes; ++i) {
        local_features.rows.row(static_cast<Eigen::Index>(i)) =
            features->rows.row(static_cast<Eigen::Index>(part.to_parent[i]));
      }
      feature_view = &local_features;
    }
    const EdgeDistribution dist = iss_probabilities(part.graph, feature_view, table);
    SparsifyOutcome outcome = iss_sparsify(part.graph, dist, rec.target,
                                           default_q_cap(rec.edges), derive_seed(seed, "sparsify"));
    rec.distinct_out = outcome.distinct_edges;
    rec.draws = outcome.q_used;
    rec.stop = outcome.stop;
    if (outcome.stop == StopReason::CapExhausted) {
      stage.soft_failures.push_back(
          {"sparsify", "component " + std::to_string(c) + ": draw cap reached with " +
                           std::to_string(outcome.distinct_edges) + " of " +
                           std::to_string(rec.target) + " distinct edges"});
    }
    stage.components.push_back(rec);
    out_parts.push_back({std::move(outcome.graph), part.to_parent});
  }
  stage.output = merge_subgraphs(g.num_nodes(), out_parts);
  return stage;
}

MetricSet compute_metrics(const WeightedGraph& g, const LabelVector* labels,
                          std::span<const std::pair<NodeId, NodeId>> pairs,
                          std::vector<double>* pair_values, const RewiringConfig& cfg) {
  MetricSet m;
  if (labels != nullptr && g.num_edges() > 0) m.homophily = homophily(g, *labels);
  if (g.num_nodes() >= 2) m.spectral_gap = spectral_gap(g);
  if (cfg.metrics.spectra && g.num_nodes() <= cfg.dense_cap && g.num_nodes() > 0) {
    m.spectrum = full_spectrum(g, cfg.dense_cap);
  }
  if (!pairs.empty()) {
    std::vector<double> values = effective_resistance_pairs(g, pairs);
    std::vector<double> finite;
    for (double v : values) {
      if (std::isfinite(v)) finite.push_back(v); else ++m.disconnected_pairs;
    }
    if (m.disconnected_pairs == 0) {
      m.mean_pair_er = std::accumulate(finite.begin(), finite.end(), 0.0) /
                       static_cast<double>(finite.size());
    }
    if (!finite.empty()) m.er_summary = er_distribution_summary(finite);
    const std::vector<double> pinv = pseudoinverse_pair_values(g, pairs);
    m.mean_pair_er_pinv =
        std::accumulate(pinv.begin(), pinv.end(), 0.0) / static_cast<double>(pinv.size());
    if (pair_values != nullptr) *pair_values = std::move(values);
  }
  return m;
}

RewiringResult rewire(const WeightedGraph& g, const NodeFeatures* features,
                      const LabelVector* labels, const RewiringConfig& cfg) {
  cfg.validate();
  if (labels != nullptr && labels->ids.size() != g.num_nodes()) {
    throw InputError("label vector has " + std::to_string(labels->ids.size()) + " entries for " +
                     std::to_string(g.num_nodes()) + " nodes");
  }
  const auto total_start = Clock::now();
  RewiringResult result;
  RewiringReport& report = result.report;
  report.config = cfg;
  report.input = summarize(g);
  report.alpha_total = cfg.alpha_for(g.num_edges());

  auto start = Clock::now();
  DensifyStage dense = densify_stage(g, report.alpha_total, cfg);
  report.timings.densify_seconds = seconds_since(start);

  start = Clock::now();
  std::vector<std::size_t> targets;
  for (const ComponentRecord& rec : dense.components) {
    targets.push_back(rec.bypassed ? 0 : sparsify_target(cfg.beta, rec.edges));
  }
  SparsifyStage sparse = sparsify_stage(dense.latent, features, cfg, targets);
  report.timings.sparsify_seconds = seconds_since(start);

  report.components = std::move(dense.components);
  for (std::size_t c = 0; c < report.components.size(); ++c) {
    ComponentRecord& rec = report.components[c];
    const ComponentRecord& s = sparse.components[c];
    rec.target = s.target;
    rec.distinct_out = s.distinct_out;
    rec.draws = s.draws;
    rec.stop = s.stop;
    rec.er_method = s.er_method;
    rec.sketch_dimension = s.sketch_dimension;
    if (rec.bypassed) continue;
    report.plan.kappa = std::max(report.plan.kappa, rec.plan.kappa);
    report.plan.q = std::max(report.plan.q, rec.plan.q);
    report.plan.epsilon_used = std::max(report.plan.epsilon_used, rec.plan.epsilon_used);
    report.plan.escalations = std::max(report.plan.escalations, rec.plan.escalations);
    report.plan.latent_size_real += rec.plan.latent_size_real;
    report.plan.latent_unbounded = report.plan.latent_unbounded || rec.plan.latent_unbounded;
    report.plan.threshold_met = report.plan.threshold_met && rec.plan.threshold_met;
    report.plan.k += rec.added;
  }
  report.soft_failures = std::move(dense.soft_failures);
  report.soft_failures.insert(report.soft_failures.end(), sparse.soft_failures.begin(),
                              sparse.soft_failures.end());
  report.latent = summarize(dense.latent);
  report.output = summarize(sparse.output);

  if (cfg.metrics.enabled) {
    start = Clock::now();
    report.er_pairs = sample_connected_pairs(g, cfg.metrics.er_pairs, derive_seed(cfg.seed, "metrics"));
    report.before = compute_metrics(g, labels, report.er_pairs, &report.er_pairs_before, cfg);
    report.after = compute_metrics(sparse.output, labels, report.er_pairs, &report.er_pairs_after, cfg);
    if (report.before->spectrum && report.after->spectrum) {
      report.spectral_distance = spectral_distance(*report.before->spectrum, *report.after->spectrum);
    }
    report.timings.metrics_seconds = seconds_since(start);
  }
  report.timings.total_seconds = seconds_since(total_start);
  result.graph = std::move(sparse.output);
  result.latent = std::move(dense.latent);
  return result;
}

WeightedGraph random_addition_baseline(const WeightedGraph& g, std::size_t k, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  const std::size_t available = n < 2 ? 0 : n * (n - 1) / 2 - g.num_edges();
  if (k > available) {
    throw InputError("cannot add " + std::to_string(k) + " edges; only " +
                     std::to_string(available) + " non-edges exist");
  }
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  if (k == 0) return g;
  Rng rng = make_rng(seed, "random-addition");
  if (2 * k >= available) {
    std::vector<std::pair<NodeId, NodeId>> free;
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (!g.has_edge(u, v)) free.emplace_back(u, v);
      }
    }
    std::shuffle(free.begin(), free.end(), rng);
    for (std::size_t i = 0; i < k; ++i) edges.push_back({free[i].first, free[i].second, 1.0});
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::unordered_set<std::uint64_t> seen;
    while (seen.size() < k) {
      auto u = static_cast<NodeId>(pick(rng));
      auto v = static_cast<NodeId>(pick(rng));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (g.has_edge(u, v)) continue;
      if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) {
        edges.push_back({u, v, 1.0});
      }
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return WeightedGraph::from_canonical(n, std::move(edges));
}

}  // namespace dsr
