#include <doctest.h>

#include <cmath>

#include "dsr/datagen.hpp"
#include "dsr/error.hpp"
#include "dsr/metrics.hpp"
#include "dsr/sampler.hpp"

TEST_CASE("block assignment is contiguous and balanced") {
  CHECK(dsr::sbm_block_of(0, 10, 2) == 0);
  CHECK(dsr::sbm_block_of(4, 10, 2) == 0);
  CHECK(dsr::sbm_block_of(5, 10, 2) == 1);
  std::vector<std::size_t> sizes(3, 0);
  for (std::size_t v = 0; v < 20; ++v) ++sizes[dsr::sbm_block_of(v, 20, 3)];
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
}

TEST_CASE("SBM extremes") {
  const auto cliques = dsr::generate_sbm({10, 2, 1.0, 0.0, 1});
  CHECK(cliques.graph.num_edges() == 20);
  CHECK(dsr::homophily(cliques.graph, cliques.labels) == 1.0);
  const auto bip = dsr::generate_sbm({10, 2, 0.0, 1.0, 1});
  CHECK(bip.graph.num_edges() == 25);
  CHECK(dsr::homophily(bip.graph, bip.labels) == 0.0);
  CHECK_THROWS_AS(dsr::generate_sbm({10, 2, 1.5, 0.0, 1}), dsr::InputError);
  CHECK_THROWS_AS(dsr::generate_sbm({10, 0, 0.5, 0.0, 1}), dsr::InputError);
}

TEST_CASE("SBM edge counts within 3 sigma of the binomial expectation") {
  // Two blocks of 100: 2 * C(100,2) within pairs, 100^2 across.
  const double within = 2.0 * 4950.0, across = 10000.0;
  const double mean = within * 0.1 + across * 0.01;
  const double sigma = std::sqrt(within * 0.1 * 0.9 + across * 0.01 * 0.99);
  CHECK(mean == doctest::Approx(1090.0));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = dsr::generate_sbm({200, 2, 0.1, 0.01, seed});
    CHECK(std::abs(static_cast<double>(g.graph.num_edges()) - mean) <= 3.0 * sigma);
  }
  CHECK(dsr::generate_sbm({200, 2, 0.1, 0.01, 4}).graph == dsr::generate_sbm({200, 2, 0.1, 0.01, 4}).graph);
}

TEST_CASE("features: noiseless means") {
  const auto labels = dsr::LabelVector::from_ids({0, 0, 1, 1});
  const auto f = dsr::generate_features(labels, 4, 0.0, 3);
  auto row = [&](int i) { return Eigen::VectorXd(f.rows.row(i).transpose()); };
  CHECK(dsr::feature_similarity(row(0), row(1)) == doctest::Approx(1.0));
  const double cos = row(0).dot(row(2)) / (row(0).norm() * row(2).norm());
  CHECK(std::abs(cos) <= 1e-12);

  const auto f1 = dsr::generate_features(labels, 1, 0.0, 3);
  CHECK(dsr::feature_similarity(f1.rows.row(0).transpose(), f1.rows.row(1).transpose()) == doctest::Approx(1.0));
  CHECK(dsr::feature_similarity(f1.rows.row(0).transpose(), f1.rows.row(2).transpose()) == doctest::Approx(0.0));
}

TEST_CASE("features: heavy noise washes out class structure") {
  std::vector<std::size_t> ids(400);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i % 2;
  const auto labels = dsr::LabelVector::from_ids(ids);
  const auto f = dsr::generate_features(labels, 8, 100.0, 7);
  double same = 0.0, cross = 0.0;
  int ns = 0, nc = 0;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < std::min(ids.size(), i + 20); ++j) {
      const Eigen::VectorXd a = f.rows.row(i).transpose(), b = f.rows.row(j).transpose();
      const double c = a.dot(b) / (a.norm() * b.norm());
      if (ids[i] == ids[j]) { same += c; ++ns; } else { cross += c; ++nc; }
    }
  }
  CHECK(std::abs(same / ns) < 0.05);
  CHECK(std::abs(cross / nc) < 0.05);
}

TEST_CASE("presets: edge counts and homophily near their calibration targets") {
  for (const auto& p : dsr::sbm_presets()) {
    if (p.n > 200) continue;  // the 2000-node presets are covered by the acceptance run
    double edges = 0.0, h = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
      const auto g = dsr::generate_sbm({p.n, 2, p.p_in, p.p_out, static_cast<std::uint64_t>(s)});
      edges += static_cast<double>(g.graph.num_edges());
      h += dsr::homophily(g.graph, g.labels);
    }
    CHECK(edges / seeds == doctest::Approx(static_cast<double>(p.target_edges)).epsilon(0.1));
    CHECK(h / seeds == doctest::Approx(p.target_homophily).epsilon(0.1));
  }
  CHECK_THROWS_AS(dsr::sbm_preset("XL-High"), dsr::InputError);
}

TEST_CASE("high presets are more homophilous than low presets at n >= 100") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto& hi = dsr::sbm_preset("M-High");
    const auto& lo = dsr::sbm_preset("M-Low");
    const auto a = dsr::generate_sbm({hi.n, 2, hi.p_in, hi.p_out, s});
    const auto b = dsr::generate_sbm({lo.n, 2, lo.p_in, lo.p_out, s});
    CHECK(dsr::homophily(a.graph, a.labels) > dsr::homophily(b.graph, b.labels));
  }
}
