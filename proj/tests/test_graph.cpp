#include <doctest.h>

#include <cmath>

#include "dsr/error.hpp"
#include "dsr/graph.hpp"
#include "support/oracles.hpp"

using dsr::RawEdge;

TEST_CASE("build_graph merges reversed duplicates by summing weights") {
  const RawEdge raw[] = {{0, 1, std::nullopt}, {1, 0, std::nullopt}};
  const auto g = dsr::build_graph(raw, 2);
  REQUIRE(g.num_edges() == 1);
  CHECK(g.edges()[0] == dsr::Edge{0, 1, 2.0});
}

TEST_CASE("build_graph drops self-loops") {
  const RawEdge raw[] = {{0, 0, 5.0}, {0, 1, 1.0}};
  const auto g = dsr::build_graph(raw, 2);
  REQUIRE(g.num_edges() == 1);
  CHECK(g.edges()[0] == dsr::Edge{0, 1, 1.0});
}

TEST_CASE("build_graph keeps a weighted path as given") {
  const RawEdge raw[] = {{0, 1, 0.5}, {1, 2, 0.5}};
  const auto g = dsr::build_graph(raw, 3);
  REQUIRE(g.num_edges() == 2);
  CHECK(g.edges()[0] == dsr::Edge{0, 1, 0.5});
  CHECK(g.edges()[1] == dsr::Edge{1, 2, 0.5});
  CHECK(g.degree(1) == 2);
}

TEST_CASE("build_graph rejects bad ids and weights") {
  const RawEdge out_of_range[] = {{0, 3, 1.0}};
  CHECK_THROWS_AS(dsr::build_graph(out_of_range, 3), dsr::InputError);
  const RawEdge negative[] = {{-1, 0, 1.0}};
  CHECK_THROWS_AS(dsr::build_graph(negative, 3), dsr::InputError);
  const RawEdge zero_weight[] = {{0, 1, 0.0}};
  CHECK_THROWS_AS(dsr::build_graph(zero_weight, 3), dsr::InputError);
  const RawEdge nan_weight[] = {{0, 1, std::nan("")}};
  CHECK_THROWS_AS(dsr::build_graph(nan_weight, 3), dsr::InputError);
}

TEST_CASE("build_graph is idempotent") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto g = oracle::random_connected(15, 20, seed, true);
    std::vector<RawEdge> raw;
    for (const auto& e : g.edges()) raw.push_back({e.u, e.v, e.w});
    CHECK(dsr::build_graph(raw, g.num_nodes()) == g);
  }
}

TEST_CASE("quadratic form examples") {
  const RawEdge single[] = {{0, 1, 3.0}};
  const double x1[] = {1.0, 0.0};
  CHECK(dsr::laplacian_quadratic_form(dsr::build_graph(single, 2), x1) == doctest::Approx(3.0));

  const auto k3 = oracle::complete(3);
  const double x2[] = {1.0, 0.0, 0.0};
  CHECK(dsr::laplacian_quadratic_form(k3, x2) == doctest::Approx(2.0));
}

TEST_CASE("quadratic form of the all-ones vector is exactly zero") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto g = oracle::random_connected(12, 15, seed, true);
    const std::vector<double> ones(g.num_nodes(), 1.0);
    CHECK(dsr::laplacian_quadratic_form(g, ones) == 0.0);
  }
}

TEST_CASE("quadratic form of a subset indicator equals the cut weight") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto g = oracle::random_connected(10, 12, seed, true);
    const std::size_t n = g.num_nodes();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
      double cut = 0.0;
      for (const auto& e : g.edges())
        if (((mask >> e.u) & 1u) != ((mask >> e.v) & 1u)) cut += e.w;
      REQUIRE(dsr::laplacian_quadratic_form(g, x) == doctest::Approx(cut).epsilon(1e-12));
    }
  }
}

TEST_CASE("laplacian_apply matches the dense Laplacian") {
  const auto g = oracle::random_connected(20, 30, 7, true);
  const auto L = oracle::laplacian(g);
  std::vector<double> x(g.num_nodes()), y(g.num_nodes());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(1.0 + static_cast<double>(i));
  dsr::laplacian_apply(g, x, y);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double expect = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) expect += L[i][j] * x[j];
    CHECK(y[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("degree examples") {
  const auto p3 = oracle::path(3);
  const auto wd = dsr::weighted_degrees(p3);
  CHECK(wd == std::vector<double>{1.0, 2.0, 1.0});
  CHECK(dsr::weighted_degrees(dsr::WeightedGraph(3)) == std::vector<double>{0.0, 0.0, 0.0});
  const RawEdge raw[] = {{0, 1, 2.5}};
  CHECK(dsr::weighted_degrees(dsr::build_graph(raw, 2)) == std::vector<double>{2.5, 2.5});
  CHECK(dsr::unweighted_degrees(p3) == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("connected components examples") {
  CHECK(dsr::connected_components(oracle::path(3)).count == 1);
  CHECK(dsr::connected_components(dsr::WeightedGraph(3)).count == 3);
  const RawEdge raw[] = {{0, 1, 1.0}, {2, 3, 1.0}};
  const auto labels = dsr::connected_components(dsr::build_graph(raw, 4));
  CHECK(labels.count == 2);
  CHECK(labels.component == std::vector<std::size_t>{0, 0, 1, 1});
}

TEST_CASE("induced subgraphs merge back to the parent graph") {
  const RawEdge raw[] = {{0, 3, 1.5}, {3, 5, 1.0}, {1, 2, 2.0}, {2, 4, 0.5}, {1, 4, 1.0}};
  const auto g = dsr::build_graph(raw, 6);
  const auto members = dsr::connected_components(g).members();
  std::vector<dsr::Subgraph> parts;
  for (const auto& m : members) parts.push_back(dsr::induced_subgraph(g, m));
  CHECK(dsr::merge_subgraphs(6, parts) == g);
}

TEST_CASE("find_edge and from_canonical validation") {
  const auto g = oracle::path(4);
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK_THROWS_AS(dsr::WeightedGraph::from_canonical(3, {{1, 0, 1.0}}), dsr::InputError);
  CHECK_THROWS_AS(dsr::WeightedGraph::from_canonical(3, {{0, 1, 1.0}, {0, 1, 1.0}}), dsr::InputError);
}
