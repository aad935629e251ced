#include <doctest.h>

#include <cmath>

#include "dsr/datagen.hpp"
#include "dsr/error.hpp"
#include "dsr/io.hpp"
#include "dsr/pipeline.hpp"
#include "support/oracles.hpp"

TEST_CASE("config validation and alpha forms") {
  dsr::RewiringConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha_fraction = 0.1;
  CHECK(cfg.alpha_for(245) == 25);
  cfg.alpha_fraction = -0.1;
  CHECK_THROWS_AS(cfg.validate(), dsr::InputError);
  dsr::RewiringConfig bad;
  bad.beta = 1.5;
  CHECK_THROWS_AS(bad.validate(), dsr::InputError);
  bad.beta = 0.5;
  CHECK_THROWS_AS(bad.validate(), dsr::InputError);
  bad.beta = 1.0;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(bad.validate(), dsr::InputError);
  CHECK(dsr::sparsify_target(1.0, 40) == 40);
  CHECK(dsr::sparsify_target(0.5, 5) == 3);
  CHECK(dsr::sparsify_target(0.01, 5) == 1);
}

TEST_CASE("single-edge graph passes through with its weight") {
  const dsr::RawEdge raw[] = {{0, 1, 2.5}};
  const auto g = dsr::build_graph(raw, 2);
  dsr::RewiringConfig cfg;
  cfg.alpha = 1;
  const auto r = dsr::rewire(g, nullptr, nullptr, cfg);
  CHECK(r.graph == g);
}

TEST_CASE("output never exceeds input density, stays inside the latent graph") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected(40, 30, seed);
    for (double beta : {0.6, 0.8, 1.0}) {
      dsr::RewiringConfig cfg;
      cfg.alpha = 4;
      cfg.beta = beta;
      cfg.seed = seed;
      cfg.metrics.enabled = false;
      const auto r = dsr::rewire(g, nullptr, nullptr, cfg);
      CHECK(r.graph.num_edges() <= g.num_edges());
      for (const auto& e : r.graph.edges()) CHECK(r.latent.has_edge(e.u, e.v));
      CHECK(r.report.output.edges == r.graph.num_edges());
    }
  }
}

TEST_CASE("alpha = 0 with k = 0: distinct edges match and weight is kept on average") {
  const auto g = oracle::complete(6);  // no non-edges, so k = 0
  dsr::RewiringConfig cfg;
  cfg.metrics.enabled = false;
  double total = 0.0;
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto r = dsr::rewire(g, nullptr, nullptr, cfg);
    CHECK(r.graph.num_edges() == g.num_edges());
    for (const auto& e : r.graph.edges()) total += e.w;
  }
  CHECK(total / seeds == doctest::Approx(15.0).epsilon(0.02));
}

TEST_CASE("components are handled separately and singletons bypass") {
  const auto a = oracle::random_connected(12, 6, 1);
  std::vector<dsr::RawEdge> raw;
  for (const auto& e : a.edges()) raw.push_back({e.u, e.v, 1.0});
  raw.push_back({12, 13, 1.0});
  const auto g = dsr::build_graph(raw, 15);  // node 14 is isolated
  dsr::RewiringConfig cfg;
  cfg.alpha = 4;
  cfg.seed = 3;
  const auto r = dsr::rewire(g, nullptr, nullptr, cfg);
  REQUIRE(r.report.components.size() == 3);
  CHECK(r.report.components[2].bypassed);
  for (const auto& e : r.graph.edges()) CHECK((e.u < 12) == (e.v < 12));
  CHECK(r.report.before->disconnected_pairs == 0);
}

TEST_CASE("rewiring is deterministic down to the report bytes") {
  const auto& p = dsr::sbm_preset("M-High");
  const auto lg = dsr::generate_sbm({p.n, 2, p.p_in, p.p_out, 7});
  const auto f = dsr::generate_features(lg.labels, p.feature_dim, p.feature_noise, 7);
  dsr::RewiringConfig cfg;
  cfg.alpha_fraction = 0.1;
  cfg.seed = 11;
  const auto a = dsr::rewire(lg.graph, &f, &lg.labels, cfg);
  const auto b = dsr::rewire(lg.graph, &f, &lg.labels, cfg);
  CHECK(a.graph == b.graph);
  auto ja = dsr::finalize_report(dsr::rewiring_report_body(a.report), "rewire");
  auto jb = dsr::finalize_report(dsr::rewiring_report_body(b.report), "rewire");
  CHECK(ja["digest"] == jb["digest"]);
  ja.erase("timings");
  jb.erase("timings");
  CHECK(ja.dump() == jb.dump());
  cfg.seed = 12;
  CHECK_FALSE(dsr::rewire(lg.graph, &f, &lg.labels, cfg).graph == a.graph);
}

TEST_CASE("approximate ER mode runs and is recorded") {
  const auto g = oracle::random_connected(60, 60, 4);
  dsr::RewiringConfig cfg;
  cfg.alpha = 5;
  cfg.er_mode = dsr::ErMode::Approx;
  cfg.metrics.enabled = false;
  const auto r = dsr::rewire(g, nullptr, nullptr, cfg);
  CHECK(r.report.components[0].er_method == dsr::ResistanceMethod::Approx);
  CHECK(r.report.components[0].sketch_dimension > 0);
}

TEST_CASE("random addition baseline") {
  const auto p3 = oracle::path(3);
  CHECK(dsr::random_addition_baseline(p3, 1, 1) == oracle::complete(3));
  CHECK_THROWS_AS(dsr::random_addition_baseline(p3, 2, 1), dsr::InputError);
  const auto g = oracle::random_connected(50, 20, 3);
  const auto h = dsr::random_addition_baseline(g, 30, 9);
  CHECK(h.num_edges() == g.num_edges() + 30);
  for (const auto& e : g.edges()) CHECK(h.has_edge(e.u, e.v));
  CHECK(h == dsr::random_addition_baseline(g, 30, 9));
}

TEST_CASE("metrics: strict and pseudoinverse mean ER") {
  const dsr::RawEdge raw[] = {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}};
  const auto g = dsr::build_graph(raw, 5);
  const std::vector<std::pair<dsr::NodeId, dsr::NodeId>> pairs{{0, 2}, {3, 4}};
  dsr::RewiringConfig cfg;
  std::vector<double> values;
  const auto m = dsr::compute_metrics(g, nullptr, pairs, &values, cfg);
  REQUIRE(m.mean_pair_er);
  CHECK(*m.mean_pair_er == doctest::Approx(1.5));
  REQUIRE(values.size() == 2);
  CHECK(values[0] == doctest::Approx(2.0));
  CHECK(values[1] == doctest::Approx(1.0));

  const dsr::RawEdge cut[] = {{0, 1, 1.0}, {3, 4, 1.0}};
  const auto h = dsr::build_graph(cut, 5);
  const auto mh = dsr::compute_metrics(h, nullptr, pairs, nullptr, cfg);
  CHECK_FALSE(mh.mean_pair_er);
  CHECK(mh.disconnected_pairs == 1);
  REQUIRE(mh.mean_pair_er_pinv);
  CHECK(std::isfinite(*mh.mean_pair_er_pinv));
}
