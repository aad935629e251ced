#include "dsr/datagen.hpp"

#include <Eigen/QR>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dsr/error.hpp"
#include "dsr/random.hpp"

namespace dsr {

std::size_t sbm_block_of(std::size_t v, std::size_t n, std::size_t blocks) {
  return v * blocks / n;
}

LabeledGraph generate_sbm(const SbmSpec& spec) {
  if (spec.n == 0) throw InputError("SBM needs at least one node");
  if (spec.blocks < 1 || spec.blocks > spec.n) throw InputError("SBM block count must lie in [1, n]");
  const auto valid = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!valid(spec.p_in) || !valid(spec.p_out)) throw InputError("SBM probabilities must lie in [0, 1]");

  Rng rng = make_rng(spec.seed, "sbm-edges");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> block(spec.n);
  for (std::size_t v = 0; v < spec.n; ++v) block[v] = sbm_block_of(v, spec.n, spec.blocks);

  std::vector<Edge> edges;
  for (std::size_t u = 0; u < spec.n; ++u) {
    for (std::size_t v = u + 1; v < spec.n; ++v) {
      const double p = block[u] == block[v] ? spec.p_in : spec.p_out;
      if (unit(rng) < p) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
    }
  }
  LabeledGraph out;
  out.graph = WeightedGraph::from_canonical(spec.n, std::move(edges));
  out.labels = LabelVector::from_ids(std::move(block));
  return out;
}

NodeFeatures generate_features(const LabelVector& labels, std::size_t dim, double noise,
                               std::uint64_t seed) {
  if (dim == 0) throw InputError("feature dimension must be at least 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError("feature noise must be finite and >= 0");
  const auto d = static_cast<Eigen::Index>(dim);
  const auto c = static_cast<Eigen::Index>(std::max<std::size_t>(labels.classes, 1));

  Rng mean_rng = make_rng(seed, "feature-means");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd means(d, c);
  if (dim == 1) {
    for (Eigen::Index k = 0; k < c; ++k) means(0, k) = k % 2 == 0 ? 1.0 : -1.0;
  } else {
    Eigen::MatrixXd raw(d, c);
    for (Eigen::Index k = 0; k < c; ++k) {
      for (Eigen::Index i = 0; i < d; ++i) raw(i, k) = normal(mean_rng);
    }
    if (c <= d) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
      means = qr.householderQ() * Eigen::MatrixXd::Identity(d, c);
    } else {
      means = raw.colwise().normalized();
    }
  }

  NodeFeatures out;
  out.rows.resize(static_cast<Eigen::Index>(labels.ids.size()), d);
  Rng noise_rng = make_rng(seed, "feature-noise");
  for (std::size_t v = 0; v < labels.ids.size(); ++v) {
    const auto row = static_cast<Eigen::Index>(v);
    out.rows.row(row) = means.col(static_cast<Eigen::Index>(labels.ids[v])).transpose();
    for (Eigen::Index i = 0; i < d; ++i) out.rows(row, i) += noise * normal(noise_rng);
  }
  return out;
}

namespace {

// Two equal blocks; p_in and p_out are solved so that the expected edge
// count and same-block edge fraction equal target_edges and
// target_homophily.
constexpr std::array<SbmPreset, 6> kPresets{{
    {"S-High", 20, 20, 0.185178, 0.03334, 0.8333, 8, 0.3},
    {"S-Low", 20, 20, 0.088889, 0.12, 0.40, 8, 0.3},
    {"M-High", 200, 245, 0.018459, 0.006225, 0.7459, 8, 0.3},
    {"M-Low", 200, 245, 0.008543, 0.016043, 0.3452, 8, 0.3},
    {"L-High", 2000, 80352, 0.060791, 0.019622, 0.7558, 8, 0.3},
    {"L-Low", 2000, 80352, 0.030999, 0.049384, 0.3854, 8, 0.3},
}};

}  // namespace

std::span<const SbmPreset> sbm_presets() { return kPresets; }

const SbmPreset& sbm_preset(std::string_view name) {
  for (const SbmPreset& p : kPresets) {
    if (p.name == name) return p;
  }
  throw InputError("unknown SBM preset '" + std::string(name) + "'");
}

}  // namespace dsr
