#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dsr/densify.hpp"
#include "dsr/error.hpp"
#include "dsr/sampler.hpp"
#include "support/oracles.hpp"

namespace {

// Expected distinct count after q uniform draws from x items.
long double expected_distinct(long double x, long double q) { return x * (1.0L - std::pow(1.0L - 1.0L / x, q)); }

dsr::EigenPair pair_from(std::vector<double> v) {
  dsr::EigenPair p;
  p.vector = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return p;
}

}  // namespace

TEST_CASE("condition number examples") {
  const dsr::RawEdge raw[] = {{0, 1, 1.0}};
  const auto edge = dsr::build_graph(raw, 2);
  const auto one = dsr::EdgeDistribution::from_scores({1.0});
  CHECK(dsr::condition_number(edge, pair_from({1 / std::sqrt(2.0), -1 / std::sqrt(2.0)}), one) == doctest::Approx(1.0));

  // Two disjoint copies of the same geometry: p_min halves, kappa doubles.
  const dsr::RawEdge two[] = {{0, 1, 1.0}, {2, 3, 1.0}};
  const auto g2 = dsr::build_graph(two, 4);
  const auto uniform2 = dsr::EdgeDistribution::from_scores({1.0, 1.0});
  const double k2 = dsr::condition_number(g2, pair_from({1, -1, 0, 0}), uniform2);
  CHECK(k2 == doctest::Approx(2.0));
  CHECK_THROWS_AS(dsr::condition_number(edge, pair_from({1.0, 1.0}), one), dsr::InputError);
}

TEST_CASE("sampling count examples") {
  CHECK(dsr::sampling_count(1.0, 0.1) == 104);
  CHECK(dsr::sampling_count(2.0, 0.1) == 416);
  CHECK(dsr::sampling_count(1.0, 0.999999) == 2);
  CHECK_THROWS_AS(dsr::sampling_count(1.0, 0.0), dsr::InputError);
  CHECK_THROWS_AS(dsr::sampling_count(1.0, 1.0), dsr::InputError);
  CHECK_THROWS_AS(dsr::sampling_count(0.0, 0.5), dsr::InputError);
  CHECK_THROWS_AS(dsr::sampling_count(1e200, 0.5), dsr::InputError);
}

TEST_CASE("latent size examples") {
  CHECK(dsr::latent_size(3.0, 2) == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  const double x = dsr::latent_size(50.0, 40);
  CHECK(std::abs(x - 105.8) <= 0.5);
  CHECK(std::abs(expected_distinct(x, 50.0) - 40.0L) <= 1e-9L);
  const double big = dsr::latent_size(1e6, 10);
  CHECK(big >= 10.0);
  CHECK(big - 10.0 <= 1e-3);
  CHECK_THROWS_AS(dsr::latent_size(5.0, 5), dsr::InputError);
}

TEST_CASE("latent size is a root and monotone over a grid") {
  for (std::size_t m = 1; m <= 200; m += 19) {
    double prev_x = INFINITY;
    for (double q = static_cast<double>(m) + 1; q < 50.0 * static_cast<double>(m) + 10; q *= 1.7) {
      const double x = dsr::latent_size(q, m);
      CHECK(std::abs(static_cast<double>(expected_distinct(x, q)) - static_cast<double>(m)) <= 1e-9 * std::max<double>(1.0, m));
      CHECK(x <= prev_x);
      prev_x = x;
    }
  }
  for (double q : {300.0, 1000.0, 5000.0}) {
    double prev_x = 0.0;
    for (std::size_t m = 1; m < 250; m += 7) {
      const double x = dsr::latent_size(q, m);
      CHECK(x > prev_x);
      prev_x = x;
    }
  }
}

TEST_CASE("candidate group size") {
  CHECK(dsr::candidate_group_size(1) == 2);
  CHECK(dsr::candidate_group_size(10) == 5);
  CHECK(dsr::candidate_group_size(11) == 6);
  for (std::size_t k = 1; k < 500; ++k) {
    const std::size_t j = dsr::candidate_group_size(k);
    CHECK(j * (j - 1) / 2 >= k);
    CHECK((j - 1) * (j - 2) / 2 < k);
  }
}

TEST_CASE("candidate edges are distinct non-edges among the selected nodes") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected(30, 20, seed);
    const auto f = dsr::fiedler_vector(g);
    for (std::size_t k : {1u, 5u, 20u}) {
      const auto c = dsr::candidate_edges(g, k, f);
      CHECK(c.edges.size() >= k);
      std::set<dsr::NodeId> sources(c.source_nodes.begin(), c.source_nodes.end());
      std::set<std::pair<dsr::NodeId, dsr::NodeId>> seen;
      for (auto [u, v] : c.edges) {
        CHECK(u < v);
        CHECK_FALSE(g.has_edge(u, v));
        CHECK(sources.count(u) == 1);
        CHECK(sources.count(v) == 1);
        CHECK(seen.insert({u, v}).second);
      }
      // Every non-edge among the source nodes is a candidate.
      std::size_t expected = 0;
      for (auto a : sources)
        for (auto b : sources)
          if (a < b && !g.has_edge(a, b)) ++expected;
      CHECK(c.edges.size() == expected);
      CHECK(sources.size() <= 4 * c.j);
    }
  }
  CHECK_THROWS_AS(dsr::candidate_edges(oracle::complete(5), 1, dsr::fiedler_vector(oracle::complete(5))),
                  dsr::InputError);
}

TEST_CASE("k = 1 uses j = 2: up to 2j extreme-Fiedler plus 2j low-degree nodes") {
  // Star with a tail: leaves have degree 1.
  const dsr::RawEdge raw[] = {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}};
  const auto g = dsr::build_graph(raw, 6);
  const auto c = dsr::candidate_edges(g, 1, dsr::fiedler_vector(g));
  CHECK(c.j == 2);
  CHECK(std::set<dsr::NodeId>(c.source_nodes.begin(), c.source_nodes.end()).size() <= 8);
  // The two leaves 1 and 2 have the lowest degree; they are always sources.
  CHECK(std::count(c.source_nodes.begin(), c.source_nodes.end(), 1) == 1);
  CHECK(std::count(c.source_nodes.begin(), c.source_nodes.end(), 2) == 1);
}

TEST_CASE("frozen candidate scores match the direct product formula") {
  const auto g = oracle::random_connected(12, 8, 3);
  const auto f = dsr::fiedler_vector(g);
  const auto uss = dsr::uss_probabilities(g, f);
  auto c = dsr::candidate_edges(g, 6, f);
  const double q = 40.0;
  dsr::candidate_scores(g, c, f, uss, q);
  double z = 0.0;
  for (double s : uss.scores) z += s;
  const auto deg = dsr::unweighted_degrees(g);
  std::vector<long double> direct;
  for (auto [u, v] : c.edges) {
    const double s = (deg[u] + 1.0 + deg[v] + 1.0 + 1.0) / std::max(std::abs(f.vector(u) - f.vector(v)), 1e-12);
    direct.push_back(std::pow(1.0L - s / (z + s), q));
  }
  long double total = 0.0L;
  for (auto d : direct) total += d;
  double sum = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(c.scores[i] == doctest::Approx(static_cast<double>(direct[i] / total)).epsilon(1e-9));
    sum += c.scores[i];
  }
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("candidate score properties: symmetry, monotonicity, q = 0") {
  // Path 0-1-2-3 with a hand-set probe: pairs (0,2) and (1,3) are mirror images.
  const auto g = oracle::path(4);
  const auto f = pair_from({-0.6, -0.2, 0.2, 0.6});
  const auto uss = dsr::uss_probabilities(g, f);
  dsr::CandidateSet c;
  c.edges = {{0, 2}, {1, 3}, {0, 3}};
  dsr::candidate_scores(g, c, f, uss, 10.0);
  CHECK(c.scores[0] == doctest::Approx(c.scores[1]));
  // (0,3) spans the larger Fiedler gap, so its s is smaller and its c larger.
  CHECK(c.scores[2] > c.scores[0]);
  dsr::candidate_scores(g, c, f, uss, 0.0);
  for (double x : c.log_scores) CHECK(x == 0.0);
  for (double x : c.scores) CHECK(x == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("full candidate scorer matches the whole-likelihood product") {
  const auto g = oracle::random_connected(10, 5, 8);
  const auto f = dsr::fiedler_vector(g);
  auto c = dsr::candidate_edges(g, 4, f);
  const double q = 25.0;
  dsr::candidate_scores_full(g, c, f, q);
  const auto deg = dsr::unweighted_degrees(g);
  std::vector<long double> direct;
  for (auto [a, b] : c.edges) {
    auto d = [&](dsr::NodeId x) { return deg[x] + (x == a || x == b ? 1.0 : 0.0); };
    auto score = [&](dsr::NodeId u, dsr::NodeId v) {
      return (d(u) + d(v) + 1.0) / std::max(std::abs(f.vector(u) - f.vector(v)), 1e-12);
    };
    long double z = score(a, b);
    for (const auto& e : g.edges()) z += score(e.u, e.v);
    long double like = std::pow(1.0L - score(a, b) / z, q);
    for (const auto& e : g.edges()) like *= 1.0L - std::pow(1.0L - score(e.u, e.v) / z, q);
    direct.push_back(like);
  }
  long double total = 0.0L;
  for (auto d : direct) total += d;
  for (std::size_t i = 0; i < direct.size(); ++i)
    CHECK(c.scores[i] == doctest::Approx(static_cast<double>(direct[i] / total)).epsilon(1e-8));
}

TEST_CASE("plan: escalation reaches alpha and stops at the smallest such epsilon") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected(30, 10, seed);
    const auto uss = dsr::uss_probabilities(g);
    const auto lead = dsr::leading_eigenpair(g);
    dsr::DensifyOptions opts;
    const auto plan = dsr::plan_densification(g, uss, lead, 5, opts);
    CHECK(plan.threshold_met);
    CHECK(plan.k >= 5);
    if (plan.escalations > 0 && !plan.latent_unbounded && plan.epsilon_used < 1.0) {
      CHECK(plan.k == 5);
      // Slightly smaller epsilon falls short.
      opts.epsilon0 = plan.epsilon_used * (1 - 1e-6);
      opts.growth = 1.0 + 1e-9;
      opts.max_escalations = 0;
      std::vector<dsr::SoftFailure> failures;
      CHECK(dsr::plan_densification(g, uss, lead, 5, opts, &failures).k < 5);
      CHECK(failures.size() == 1);
    }
  }
}

TEST_CASE("plan: an epsilon cap ends escalation with a soft failure") {
  const auto g = oracle::random_connected(30, 10, 1);
  dsr::DensifyOptions opts;
  opts.epsilon_cap = 0.12;
  std::vector<dsr::SoftFailure> failures;
  const auto plan = dsr::plan_densification(g, dsr::uss_probabilities(g), dsr::leading_eigenpair(g), 1000, opts, &failures);
  CHECK_FALSE(plan.threshold_met);
  CHECK(plan.epsilon_used <= 0.12);
  CHECK(failures.size() == 1);
}

TEST_CASE("densify: uniform weights 40/44 for m = 40 and k = 4") {
  const auto g = oracle::random_connected(30, 11, 5);
  REQUIRE(g.num_edges() == 40);
  const auto r = dsr::densify_connected(g, 4, {}, 9);
  REQUIRE(r.plan.k == 4);
  CHECK(r.added.size() == 4);
  CHECK(r.latent.num_edges() == 44);
  double total = 0.0;
  for (const auto& e : r.latent.edges()) {
    CHECK(e.w == doctest::Approx(40.0 / 44.0).epsilon(1e-15));
    total += e.w;
  }
  CHECK(total == doctest::Approx(40.0).epsilon(1e-9));
  for (const auto& e : g.edges()) CHECK(r.latent.has_edge(e.u, e.v));
}

TEST_CASE("densify: alpha = 0, complete graphs and determinism") {
  const auto g = oracle::random_connected(20, 5, 2);
  const auto zero = dsr::densify_connected(g, 0, {}, 1);
  CHECK(zero.plan.escalations == 0);
  CHECK(zero.latent.num_edges() == g.num_edges() + zero.added.size());

  const auto k5 = dsr::densify_connected(oracle::complete(5), 3, {}, 1);
  CHECK(k5.added.empty());
  CHECK(k5.latent.num_edges() == 10);

  const auto a = dsr::densify_connected(g, 6, {}, 42);
  const auto b = dsr::densify_connected(g, 6, {}, 42);
  CHECK(a.latent == b.latent);
  CHECK(a.added == b.added);
}

TEST_CASE("densify: pseudocode weights keep E and scale it by m / |E_l|") {
  const auto g = oracle::random_connected(25, 10, 4, true);
  dsr::DensifyOptions opts;
  opts.weights = dsr::LatentWeights::Pseudocode;
  const auto r = dsr::densify_connected(g, 5, opts, 3);
  const double scale = static_cast<double>(g.num_edges()) / static_cast<double>(r.latent.num_edges());
  for (const auto& e : g.edges()) {
    const auto idx = r.latent.find_edge(e.u, e.v);
    REQUIRE(idx);
    CHECK(r.latent.edges()[*idx].w == doctest::Approx(e.w * scale));
  }
}

TEST_CASE("densify on a disconnected graph stays inside components") {
  const auto a = oracle::random_connected(15, 5, 1);
  const auto b = oracle::random_connected(10, 3, 2);
  std::vector<dsr::RawEdge> raw;
  for (const auto& e : a.edges()) raw.push_back({e.u, e.v, 1.0});
  for (const auto& e : b.edges()) raw.push_back({e.u + 15, e.v + 15, 1.0});
  const auto g = dsr::build_graph(raw, 26);
  const auto r = dsr::densify(g, 6, {}, 5);
  for (auto [u, v] : r.added) CHECK((u < 15) == (v < 15));
  CHECK(dsr::connected_components(r.latent).count == 3);
}

TEST_CASE("apportion alpha") {
  const std::size_t edges[] = {30, 10, 0, 5};
  const std::size_t free_pairs[] = {100, 20, 0, 0};
  const auto share = dsr::apportion_alpha(8, edges, free_pairs);
  CHECK(share == std::vector<std::size_t>{6, 2, 0, 0});
  const std::size_t tiny_edges[] = {100, 1};
  const std::size_t tiny_free[] = {50, 1};
  CHECK(dsr::apportion_alpha(4, tiny_edges, tiny_free) == std::vector<std::size_t>{4, 1});
  CHECK(dsr::apportion_alpha(0, tiny_edges, tiny_free) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("densified graph stays spectrally close at the plan's epsilon for the leading probe") {
  int ok = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto g = oracle::random_connected(40, 30, seed);
    const auto r = dsr::densify_connected(g, 4, {}, seed);
    const auto lead = dsr::leading_eigenpair(g);
    std::vector<double> x(lead.vector.data(), lead.vector.data() + lead.vector.size());
    const double a = dsr::laplacian_quadratic_form(g, x);
    const double b = dsr::laplacian_quadratic_form(r.latent, x);
    ok += std::abs(b - a) <= r.plan.epsilon_used * a ? 1 : 0;
  }
  CHECK(ok >= 14);
}
