#include <doctest.h>

#include "dsr/error.hpp"
#include "dsr/metrics.hpp"
#include "support/oracles.hpp"

TEST_CASE("homophily examples") {
  const auto k3 = oracle::complete(3);
  CHECK(dsr::homophily(k3, dsr::LabelVector::from_ids({0, 0, 0})) == 1.0);
  const dsr::RawEdge raw[] = {{0, 2, 1.0}, {0, 3, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}};
  CHECK(dsr::homophily(dsr::build_graph(raw, 4), dsr::LabelVector::from_ids({0, 0, 1, 1})) == 0.0);
  CHECK(dsr::homophily(oracle::path(3), dsr::LabelVector::from_ids({0, 0, 1})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(dsr::homophily(k3, dsr::LabelVector::from_ids({0, 1})), dsr::InputError);
  CHECK_THROWS_AS(dsr::homophily(dsr::WeightedGraph(3), dsr::LabelVector::from_ids({0, 1, 1})), dsr::InputError);
}

TEST_CASE("homophily ignores weights unless asked") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected(20, 20, seed);
    std::vector<std::size_t> ids(20);
    for (std::size_t i = 0; i < 20; ++i) ids[i] = (i * 7 + seed) % 3;
    const auto labels = dsr::LabelVector::from_ids(ids);
    std::vector<double> w;
    for (std::size_t i = 0; i < g.num_edges(); ++i) w.push_back(0.1 + static_cast<double>(i));
    const auto h = g.with_weights(w);
    CHECK(dsr::homophily(g, labels) == dsr::homophily(h, labels));
    double same = 0.0, total = 0.0;
    for (const auto& e : h.edges()) {
      total += e.w;
      if (ids[e.u] == ids[e.v]) same += e.w;
    }
    CHECK(dsr::homophily(h, labels, true) == doctest::Approx(same / total));
  }
}

TEST_CASE("spectral gap examples and properties") {
  const dsr::RawEdge raw[] = {{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(dsr::spectral_gap(dsr::build_graph(raw, 4)) == 0.0);
  CHECK(dsr::spectral_gap(oracle::complete(3)) == doctest::Approx(3.0));
  CHECK(dsr::spectral_gap(oracle::path(3)) == doctest::Approx(1.0));
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected(25, 20, seed, true);
    const double gap = dsr::spectral_gap(g);
    CHECK(gap > 1e-8);
    std::vector<double> w;
    for (const auto& e : g.edges()) w.push_back(2.5 * e.w);
    CHECK(dsr::spectral_gap(g.with_weights(w)) == doctest::Approx(2.5 * gap).epsilon(1e-8));
  }
}

TEST_CASE("ER distribution summary") {
  const double same[] = {0.7, 0.7, 0.7, 0.7};
  const auto s = dsr::er_distribution_summary(same);
  CHECK(s.mean == doctest::Approx(0.7));
  CHECK(s.median == 0.7);
  CHECK(s.p10 == 0.7);
  CHECK(s.p90 == 0.7);
  const double p3[] = {1.0, 1.0, 2.0};
  const auto t = dsr::er_distribution_summary(p3);
  CHECK(t.mean == doctest::Approx(4.0 / 3.0));
  CHECK(t.median == 1.0);
  CHECK(t.max == 2.0);
  std::size_t total = 0;
  for (auto c : t.histogram) total += c;
  CHECK(total == 3);
  CHECK(t.histogram.size() == dsr::ErSummary::kBins);
  const double one[] = {3.5};
  const auto u = dsr::er_distribution_summary(one);
  CHECK(u.mean == 3.5);
  CHECK(u.p10 == 3.5);
  CHECK(u.p90 == 3.5);
  CHECK(u.max == 3.5);
}

TEST_CASE("quantiles interpolate linearly") {
  const double v[] = {0.0, 10.0, 20.0, 30.0, 40.0};
  CHECK(dsr::sorted_quantile(v, 0.5) == 20.0);
  CHECK(dsr::sorted_quantile(v, 0.1) == doctest::Approx(4.0));
  CHECK(dsr::sorted_quantile(v, 1.0) == 40.0);
}
