#include "dsr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "dsr/error.hpp"
#include "dsr/random.hpp"

namespace dsr {

EdgeDistribution EdgeDistribution::from_scores(std::vector<double> scores) {
  if (scores.empty()) throw InputError("edge distribution over an empty edge set");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] > 0.0) || !std::isfinite(scores[i])) {
      throw InputError("edge score " + std::to_string(i) + " is not positive and finite");
    }
    total += scores[i];
  }
  EdgeDistribution dist;
  dist.probabilities.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) dist.probabilities[i] = scores[i] / total;
  dist.scores = std::move(scores);
  return dist;
}

double EdgeDistribution::min_probability() const {
  return *std::min_element(probabilities.begin(), probabilities.end());
}

namespace {

void require_aligned(const WeightedGraph& g, const EdgeDistribution& dist) {
  if (dist.size() != g.num_edges()) throw InputError("distribution is not aligned with edges");
}

SparsifyOutcome collect(const WeightedGraph& g, const EdgeDistribution& dist,
                        std::vector<std::uint64_t> hits, std::uint64_t draws, StopReason stop) {
  SparsifyOutcome out;
  std::vector<Edge> kept;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] == 0) continue;
    const Edge& e = g.edges()[i];
    const double w = static_cast<double>(hits[i]) * e.w /
                     (static_cast<double>(draws) * dist.probabilities[i]);
    kept.push_back({e.u, e.v, w});
  }
  out.distinct_edges = kept.size();
  out.graph = WeightedGraph::from_canonical(g.num_nodes(), std::move(kept));
  out.q_used = draws;
  out.hits = std::move(hits);
  out.stop = stop;
  return out;
}

}  // namespace

SparsifyOutcome sample_sparsifier(const WeightedGraph& g, const EdgeDistribution& dist,
                                  std::uint64_t q, std::uint64_t seed) {
  require_aligned(g, dist);
  if (q == 0) throw InputError("sampling count q must be at least 1");
  if (q > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) {
    throw InputError("sampling count q exceeds the supported range");
  }
  const std::size_t m = dist.size();
  // Suffix sums keep the conditional probabilities accurate near the tail.
  std::vector<double> suffix(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] + dist.probabilities[i];

  Rng rng = make_rng(seed, "sample-sparsifier");
  std::vector<std::uint64_t> hits(m, 0);
  std::uint64_t remaining = q;
  for (std::size_t i = 0; i < m && remaining > 0; ++i) {
    if (i + 1 == m) {
      hits[i] = remaining;
      break;
    }
    const double p = std::clamp(dist.probabilities[i] / suffix[i], 0.0, 1.0);
    std::binomial_distribution<long long> binom(static_cast<long long>(remaining), p);
    const auto k = static_cast<std::uint64_t>(binom(rng));
    hits[i] = k;
    remaining -= k;
  }
  return collect(g, dist, std::move(hits), q, StopReason::FixedCount);
}

double uss_score(double deg_u, double deg_v, double f_u, double f_v, double floor) {
  return (deg_u + deg_v + 1.0) / std::max(std::abs(f_u - f_v), floor);
}

EdgeDistribution uss_probabilities(const WeightedGraph& g, const UssOptions& options) {
  return uss_probabilities(g, fiedler_vector(g, options.eigen), options);
}

EdgeDistribution uss_probabilities(const WeightedGraph& g, const EigenPair& fiedler,
                                   const UssOptions& options) {
  if (static_cast<std::size_t>(fiedler.vector.size()) != g.num_nodes()) {
    throw InputError("Fiedler vector length does not match node count");
  }
  std::vector<double> degree(g.num_nodes());
  if (options.degrees == DegreeConvention::Unweighted) {
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      degree[v] = static_cast<double>(g.degree(static_cast<NodeId>(v)));
    }
  } else {
    degree = weighted_degrees(g);
  }
  std::vector<double> scores;
  scores.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    scores.push_back(uss_score(degree[e.u], degree[e.v], fiedler.vector(e.u), fiedler.vector(e.v),
                               options.fiedler_floor));
  }
  return EdgeDistribution::from_scores(std::move(scores));
}

SparsifyOutcome uss_sparsify(const WeightedGraph& g, std::uint64_t q, std::uint64_t seed,
                             const UssOptions& options) {
  return sample_sparsifier(g, uss_probabilities(g, options), q, seed);
}

double feature_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.5;
  const double cosine = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return (1.0 + cosine) / 2.0;
}

EdgeDistribution iss_probabilities(const WeightedGraph& g, const NodeFeatures* features,
                                   const ResistanceTable& resistances) {
  if (resistances.values.size() != g.num_edges()) {
    throw InputError("resistance table is not aligned with edges");
  }
  if (features != nullptr && features->num_nodes() != g.num_nodes()) {
    throw InputError("feature matrix has " + std::to_string(features->num_nodes()) +
                     " rows for " + std::to_string(g.num_nodes()) + " nodes");
  }
  std::vector<double> scores;
  scores.reserve(g.num_edges());
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edges()[i];
    double similarity = 0.5;
    if (features != nullptr) {
      similarity = feature_similarity(features->rows.row(e.u).transpose(),
                                      features->rows.row(e.v).transpose());
    }
    scores.push_back((1.0 + similarity) * resistances.values[i]);
  }
  return EdgeDistribution::from_scores(std::move(scores));
}

std::uint64_t default_q_cap(std::size_t num_edges) {
  const double m = static_cast<double>(num_edges);
  return static_cast<std::uint64_t>(std::ceil(50.0 * m * std::log(m + 2.0)));
}

SparsifyOutcome iss_sparsify(const WeightedGraph& g, const EdgeDistribution& dist,
                             std::size_t target_distinct, std::uint64_t q_cap,
                             std::uint64_t seed) {
  require_aligned(g, dist);
  if (target_distinct == 0 || target_distinct > g.num_edges()) {
    throw InputError("target distinct count must lie in [1, |E|]");
  }
  if (q_cap == 0) throw InputError("draw cap must be at least 1");
  Rng rng = make_rng(seed, "iss-draws");
  std::discrete_distribution<std::size_t> draw(dist.probabilities.begin(),
                                               dist.probabilities.end());
  std::vector<std::uint64_t> hits(g.num_edges(), 0);
  std::size_t distinct = 0;
  std::uint64_t draws = 0;
  while (distinct < target_distinct && draws < q_cap) {
    const std::size_t e = draw(rng);
    if (hits[e]++ == 0) ++distinct;
    ++draws;
  }
  const StopReason stop =
      distinct >= target_distinct ? StopReason::TargetReached : StopReason::CapExhausted;
  return collect(g, dist, std::move(hits), draws, stop);
}

SparsifyOutcome iss_sparsify(const WeightedGraph& g, const NodeFeatures* features,
                             const ResistanceTable& resistances, std::size_t target_distinct,
                             std::uint64_t q_cap, std::uint64_t seed) {
  return iss_sparsify(g, iss_probabilities(g, features, resistances), target_distinct, q_cap,
                      seed);
}

}  // namespace dsr
