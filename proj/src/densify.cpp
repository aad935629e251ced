#include "dsr/densify.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "dsr/random.hpp"

namespace dsr {

namespace {

double sampling_count_real(double kappa, double epsilon) {
  return std::ceil(kappa * kappa / (2.0 * epsilon * epsilon) * std::log(8.0));
}

// x (1 - (1 - 1/x)^q) - m, with the power evaluated through log1p/expm1 so
// that large x and large q keep their precision.
double latent_residual(double x, double q, double m) {
  return -x * std::expm1(q * std::log1p(-1.0 / x)) - m;
}

std::size_t non_edge_count(const WeightedGraph& g) {
  const std::size_t n = g.num_nodes();
  return n * (n - 1) / 2 - g.num_edges();
}

}  // namespace

double condition_number(const WeightedGraph& g, const EigenPair& probe,
                        const EdgeDistribution& dist) {
  if (dist.size() != g.num_edges()) throw InputError("distribution is not aligned with edges");
  if (static_cast<std::size_t>(probe.vector.size()) != g.num_nodes()) {
    throw InputError("probe length does not match node count");
  }
  double max_sq = 0.0;
  double sum_sq = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = probe.vector(e.u) - probe.vector(e.v);
    max_sq = std::max(max_sq, d * d);
    sum_sq += d * d;
  }
  if (!(sum_sq > 0.0)) throw InputError("probe has a zero quadratic form; kappa is undefined");
  return max_sq / (dist.min_probability() * sum_sq);
}

std::uint64_t sampling_count(double kappa, double epsilon) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("kappa must be positive and finite");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  const double q = sampling_count_real(kappa, epsilon);
  if (!(q < 18446744073709551615.0)) throw InputError("sampling count overflows 64 bits");
  return static_cast<std::uint64_t>(q);
}

double latent_size(double q, std::size_t m) {
  if (m == 0) throw InputError("latent size needs at least one edge");
  const double md = static_cast<double>(m);
  if (!(q > md)) {
    throw InputError("latent size has no finite solution when q <= |E| (q = " +
                     std::to_string(q) + ", |E| = " + std::to_string(m) + ")");
  }
  const auto f = [&](double x) { return latent_residual(x, q, md); };
  double lo = md;
  if (f(lo) >= 0.0) return lo;  // only for m = 1, where every draw hits the same edge
  const double limit = 1e9 * md;
  double hi = 2.0 * md;
  while (f(hi) < 0.0) {
    if (hi >= limit) throw NumericError("latent size has no root below 1e9 * |E|");
    lo = hi;
    hi = std::min(2.0 * hi, limit);
  }
  std::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  double a = bracket.first;
  double b = bracket.second;
  double x = 0.5 * (a + b);
  // toms748 stops on bracket width; finish by bisection on the residual.
  for (int i = 0; i < 200 && std::abs(f(x)) > 1e-9; ++i) {
    if (f(x) < 0.0) a = x; else b = x;
    const double mid = 0.5 * (a + b);
    if (mid == x) break;
    x = mid;
  }
  return x;
}

std::size_t candidate_group_size(std::size_t k) {
  std::size_t j = 2;
  while (j * (j - 1) / 2 < k) ++j;
  return j;
}

CandidateSet candidate_edges(const WeightedGraph& g, std::size_t k, const EigenPair& fiedler) {
  const std::size_t n = g.num_nodes();
  if (static_cast<std::size_t>(fiedler.vector.size()) != n) {
    throw InputError("Fiedler vector length does not match node count");
  }
  if (k == 0) return {};
  if (non_edge_count(g) < k) {
    throw InputError("graph has " + std::to_string(non_edge_count(g)) +
                     " non-edges but " + std::to_string(k) + " candidates are needed");
  }
  std::vector<NodeId> by_fiedler(n);
  std::iota(by_fiedler.begin(), by_fiedler.end(), 0);
  std::vector<NodeId> by_degree = by_fiedler;
  std::stable_sort(by_fiedler.begin(), by_fiedler.end(), [&](NodeId a, NodeId b) {
    return std::abs(fiedler.vector(a)) > std::abs(fiedler.vector(b));
  });
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](NodeId a, NodeId b) { return g.degree(a) < g.degree(b); });

  CandidateSet out;
  for (std::size_t j = candidate_group_size(k);; ++j) {
    const std::size_t take = std::min(2 * j, n);
    std::vector<NodeId> nodes(by_fiedler.begin(), by_fiedler.begin() + take);
    nodes.insert(nodes.end(), by_degree.begin(), by_degree.begin() + take);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    out.edges.clear();
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      for (std::size_t b = a + 1; b < nodes.size(); ++b) {
        if (!g.has_edge(nodes[a], nodes[b])) out.edges.emplace_back(nodes[a], nodes[b]);
      }
    }
    out.j = j;
    out.source_nodes = std::move(nodes);
    if (out.edges.size() >= k || take == n) break;
  }
  return out;
}

namespace {

std::vector<double> degree_vector(const WeightedGraph& g, DegreeConvention convention) {
  if (convention == DegreeConvention::Weighted) return weighted_degrees(g);
  std::vector<double> degree(g.num_nodes());
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    degree[v] = static_cast<double>(g.degree(static_cast<NodeId>(v)));
  }
  return degree;
}

void normalize_log_scores(CandidateSet& candidates) {
  const std::size_t c = candidates.edges.size();
  candidates.scores.assign(c, 0.0);
  if (c == 0) return;
  const double top = *std::max_element(candidates.log_scores.begin(), candidates.log_scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    candidates.scores[i] = std::exp(candidates.log_scores[i] - top);
    total += candidates.scores[i];
  }
  for (double& s : candidates.scores) s /= total;
}

double mean_edge_weight(const WeightedGraph& g) {
  return g.num_edges() == 0 ? 1.0 : total_edge_weight(g) / static_cast<double>(g.num_edges());
}

}  // namespace

void candidate_scores(const WeightedGraph& g, CandidateSet& candidates, const EigenPair& fiedler,
                      const EdgeDistribution& uss, double q, const UssOptions& options) {
  if (uss.size() != g.num_edges()) throw InputError("distribution is not aligned with edges");
  if (!(q >= 0.0)) throw InputError("q must be non-negative");
  const double z = std::accumulate(uss.scores.begin(), uss.scores.end(), 0.0);
  const double mean_weight = mean_edge_weight(g);
  const std::vector<double> degree = degree_vector(g, options.degrees);
  const double added_degree = options.degrees == DegreeConvention::Unweighted ? 1.0 : mean_weight;

  const std::size_t c = candidates.edges.size();
  candidates.log_scores.assign(c, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    const auto [u, v] = candidates.edges[i];
    const double s = uss_score(degree[u] + added_degree, degree[v] + added_degree,
                               fiedler.vector(u), fiedler.vector(v), options.fiedler_floor);
    const double p = s / (z + s);
    candidates.log_scores[i] = q == 0.0 ? 0.0 : mean_weight * q * std::log1p(-p);
  }
  normalize_log_scores(candidates);
}

void candidate_scores_full(const WeightedGraph& g, CandidateSet& candidates,
                           const EigenPair& fiedler, double q, const UssOptions& options) {
  if (!(q >= 0.0)) throw InputError("q must be non-negative");
  const double mean_weight = mean_edge_weight(g);
  const std::vector<double> degree = degree_vector(g, options.degrees);
  const double added_degree = options.degrees == DegreeConvention::Unweighted ? 1.0 : mean_weight;
  const auto& f = fiedler.vector;

  const std::size_t c = candidates.edges.size();
  candidates.log_scores.assign(c, 0.0);
  if (q == 0.0) {
    normalize_log_scores(candidates);
    return;
  }
  std::vector<double> scores(g.num_edges());
  for (std::size_t i = 0; i < c; ++i) {
    const auto [a, b] = candidates.edges[i];
    const auto deg = [&](NodeId x) { return degree[x] + (x == a || x == b ? added_degree : 0.0); };
    double z = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const Edge& edge = g.edges()[e];
      scores[e] = uss_score(deg(edge.u), deg(edge.v), f(edge.u), f(edge.v), options.fiedler_floor);
      z += scores[e];
    }
    const double s_new = uss_score(deg(a), deg(b), f(a), f(b), options.fiedler_floor);
    z += s_new;
    double log_objective = mean_weight * q * std::log1p(-s_new / z);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      // log(1 - (1 - p)^q)
      const double miss = q * std::log1p(-scores[e] / z);
      log_objective += g.edges()[e].w * std::log(-std::expm1(miss));
    }
    candidates.log_scores[i] = log_objective;
  }
  normalize_log_scores(candidates);
}

DensifyPlan plan_densification(const WeightedGraph& g, const EdgeDistribution& uss,
                               const EigenPair& leading, std::size_t alpha,
                               const DensifyOptions& options,
                               std::vector<SoftFailure>* soft_failures) {
  if (!(options.epsilon0 > 0.0 && options.epsilon0 < 1.0)) {
    throw InputError("epsilon must lie in (0, 1)");
  }
  if (!(options.growth > 1.0)) throw InputError("epsilon growth factor must exceed 1");
  const std::size_t m = g.num_edges();
  const double md = static_cast<double>(m);

  DensifyPlan plan;
  plan.kappa = condition_number(g, leading, uss);

  // k as a function of epsilon; k is nondecreasing in epsilon.
  struct Step {
    double q;
    double x;
    bool unbounded;
    std::size_t k;
  };
  const auto evaluate = [&](double eps) {
    Step s{sampling_count_real(plan.kappa, eps), 0.0, false, 0};
    if (s.q <= md) {
      s.unbounded = true;
      s.k = alpha;
      return s;
    }
    s.x = latent_size(s.q, m);
    const double extra = std::max(0.0, std::round(s.x) - md);
    s.k = extra >= 1e18 ? std::numeric_limits<std::size_t>::max()
                        : static_cast<std::size_t>(extra);
    return s;
  };
  const auto record = [&](double eps, const Step& s) {
    plan.epsilon_used = eps;
    plan.q = s.q;
    plan.latent_size_real = s.unbounded ? std::numeric_limits<double>::infinity() : s.x;
    plan.latent_unbounded = s.unbounded;
    plan.k = s.k;
  };

  double eps = options.epsilon0;
  Step step = evaluate(eps);
  record(eps, step);
  double below = 0.0;  // largest epsilon seen with k < alpha
  bool escalated = false;
  while (step.k < alpha) {
    const bool capped = options.epsilon_cap && eps >= *options.epsilon_cap;
    if (capped || plan.escalations >= options.max_escalations) {
      plan.threshold_met = false;
      if (soft_failures) {
        soft_failures->push_back({"densify", "k = " + std::to_string(step.k) +
                                                 " stayed below alpha = " + std::to_string(alpha) +
                                                 " at epsilon = " + std::to_string(eps)});
      }
      break;
    }
    below = eps;
    eps *= options.growth;
    if (options.epsilon_cap) eps = std::min(eps, *options.epsilon_cap);
    ++plan.escalations;
    escalated = true;
    step = evaluate(eps);
    record(eps, step);
  }

  if (escalated && plan.threshold_met && options.refine) {
    // Smallest epsilon in (below, eps] that still reaches alpha.
    double lo = below;
    double hi = eps;
    for (int i = 0; i < 60 && hi - lo > 1e-12 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (evaluate(mid).k >= alpha) hi = mid; else lo = mid;
    }
    record(hi, evaluate(hi));
  }
  return plan;
}

DensifyResult densify_connected(const WeightedGraph& g, std::size_t alpha,
                                const DensifyOptions& options, std::uint64_t seed) {
  const std::size_t m = g.num_edges();
  if (m == 0) throw InputError("densification needs at least one edge");
  if (connected_components(g).count != 1) throw InputError("densify_connected needs a connected graph");

  DensifyResult result;
  const EigenPair fiedler = fiedler_vector(g, options.uss.eigen);
  const EigenPair leading = leading_eigenpair(g, options.uss.eigen);
  if (!fiedler.converged) result.soft_failures.push_back({"fiedler", "eigensolver did not converge"});
  if (!leading.converged) {
    result.soft_failures.push_back({"leading-eigenpair", "eigensolver did not converge"});
  }
  const EdgeDistribution uss = uss_probabilities(g, fiedler, options.uss);
  result.plan = plan_densification(g, uss, leading, alpha, options, &result.soft_failures);

  const std::size_t available = non_edge_count(g);
  std::size_t k = result.plan.k;
  if (k > available) {
    result.soft_failures.push_back({"densify", "k = " + std::to_string(k) + " truncated to the " +
                                                   std::to_string(available) + " available non-edges"});
    k = available;
    result.plan.k = k;
  }

  std::vector<double> accumulated;
  std::uint64_t draws = 0;
  if (k > 0) {
    CandidateSet candidates = candidate_edges(g, k, fiedler);
    if (options.scoring == CandidateScoring::Full) {
      candidate_scores_full(g, candidates, fiedler, result.plan.q, options.uss);
    } else {
      candidate_scores(g, candidates, fiedler, uss, result.plan.q, options.uss);
    }

    Rng rng = make_rng(seed, "densify-candidates");
    std::discrete_distribution<std::size_t> draw(candidates.scores.begin(), candidates.scores.end());
    std::vector<char> chosen(candidates.edges.size(), 0);
    accumulated.assign(candidates.edges.size(), 0.0);
    std::size_t picked = 0;
    const std::uint64_t cap = 1000 * static_cast<std::uint64_t>(k) + 10 * candidates.edges.size();
    while (picked < k && draws < cap) {
      const std::size_t i = draw(rng);
      ++draws;
      accumulated[i] += 1.0 / candidates.scores[i];
      if (!chosen[i]) {
        chosen[i] = 1;
        ++picked;
      }
    }
    if (picked < k) {
      // Scores too concentrated to reach k distinct picks; fill by rank.
      std::vector<std::size_t> order(candidates.edges.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates.log_scores[a] > candidates.log_scores[b];
      });
      for (std::size_t i : order) {
        if (picked == k) break;
        if (chosen[i]) continue;
        chosen[i] = 1;
        accumulated[i] += 1.0 / std::max(candidates.scores[i], std::numeric_limits<double>::min());
        ++picked;
      }
      result.soft_failures.push_back(
          {"densify", "candidate draws hit the cap; remaining picks filled by score rank"});
    }
    for (std::size_t i = 0; i < candidates.edges.size(); ++i) {
      if (chosen[i]) result.added.push_back(candidates.edges[i]);
    }
    // Keep accumulated weights aligned with result.added.
    std::vector<double> acc;
    for (std::size_t i = 0; i < candidates.edges.size(); ++i) {
      if (chosen[i]) acc.push_back(accumulated[i]);
    }
    accumulated = std::move(acc);
  }

  const double latent_edges = static_cast<double>(m + result.added.size());
  std::vector<Edge> edges;
  edges.reserve(m + result.added.size());
  if (options.weights == LatentWeights::Uniform) {
    const double w = total_edge_weight(g) / latent_edges;
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, w});
    for (const auto& [u, v] : result.added) edges.push_back({u, v, w});
  } else {
    const double scale = static_cast<double>(m) / latent_edges;
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, e.w * scale});
    for (std::size_t i = 0; i < result.added.size(); ++i) {
      const auto [u, v] = result.added[i];
      edges.push_back({u, v, accumulated[i] / static_cast<double>(draws)});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  result.latent = WeightedGraph::from_canonical(g.num_nodes(), std::move(edges));
  return result;
}

std::vector<std::size_t> apportion_alpha(std::size_t alpha, std::span<const std::size_t> edges,
                                         std::span<const std::size_t> non_edges) {
  std::vector<std::size_t> share(edges.size(), 0);
  std::size_t total = 0;
  for (std::size_t c = 0; c < edges.size(); ++c) {
    if (non_edges[c] > 0) total += edges[c];
  }
  if (alpha == 0 || total == 0) return share;
  for (std::size_t c = 0; c < edges.size(); ++c) {
    if (non_edges[c] == 0 || edges[c] == 0) continue;
    const double exact = static_cast<double>(alpha) * static_cast<double>(edges[c]) /
                         static_cast<double>(total);
    share[c] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(exact)));
  }
  return share;
}

DensifyResult densify(const WeightedGraph& g, std::size_t alpha, const DensifyOptions& options,
                      std::uint64_t seed) {
  if (g.num_edges() == 0) throw InputError("densification needs at least one edge");
  const ComponentLabeling labels = connected_components(g);
  if (labels.count == 1) return densify_connected(g, alpha, options, seed);

  const auto members = labels.members();
  std::vector<Subgraph> parts;
  std::vector<std::size_t> edge_counts;
  std::vector<std::size_t> free_pairs;
  for (const auto& nodes : members) {
    parts.push_back(induced_subgraph(g, nodes));
    edge_counts.push_back(parts.back().graph.num_edges());
    free_pairs.push_back(non_edge_count(parts.back().graph));
  }
  const auto share = apportion_alpha(alpha, edge_counts, free_pairs);

  DensifyResult result;
  std::vector<Subgraph> latent_parts;
  double kappa = 0.0;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    if (parts[c].graph.num_edges() == 0) {
      latent_parts.push_back(parts[c]);
      continue;
    }
    DensifyResult sub =
        densify_connected(parts[c].graph, share[c], options, derive_seed(seed, "densify-component", c));
    for (auto& f : sub.soft_failures) {
      f.message = "component " + std::to_string(c) + ": " + f.message;
      result.soft_failures.push_back(std::move(f));
    }
    for (const auto& [u, v] : sub.added) {
      NodeId a = parts[c].to_parent[u];
      NodeId b = parts[c].to_parent[v];
      if (a > b) std::swap(a, b);
      result.added.emplace_back(a, b);
    }
    kappa = std::max(kappa, sub.plan.kappa);
    result.plan.k += sub.plan.k;
    result.plan.q = std::max(result.plan.q, sub.plan.q);
    result.plan.epsilon_used = std::max(result.plan.epsilon_used, sub.plan.epsilon_used);
    result.plan.escalations = std::max(result.plan.escalations, sub.plan.escalations);
    result.plan.latent_unbounded = result.plan.latent_unbounded || sub.plan.latent_unbounded;
    result.plan.threshold_met = result.plan.threshold_met && sub.plan.threshold_met;
    result.plan.latent_size_real += sub.plan.latent_size_real;
    latent_parts.push_back({std::move(sub.latent), parts[c].to_parent});
  }
  result.plan.kappa = kappa;
  std::sort(result.added.begin(), result.added.end());
  result.latent = merge_subgraphs(g.num_nodes(), latent_parts);
  return result;
}

}  // namespace dsr
