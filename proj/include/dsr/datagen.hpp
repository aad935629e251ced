#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "dsr/graph.hpp"
#include "dsr/node_data.hpp"

namespace dsr {

struct SbmSpec {
  std::size_t n = 0;
  std::size_t blocks = 2;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
};

struct LabeledGraph {
  WeightedGraph graph;
  LabelVector labels;
};

/// Block of node v is floor(v * blocks / n), so blocks are contiguous and
/// their sizes differ by at most one.
std::size_t sbm_block_of(std::size_t v, std::size_t n, std::size_t blocks);

/// Unit-weight stochastic block model; labels are block ids.
LabeledGraph generate_sbm(const SbmSpec& spec);

/// Class mean plus isotropic Gaussian noise. Class means are orthonormal
/// when classes <= dim, +1/-1 by class parity when dim == 1, and random unit
/// vectors otherwise.
NodeFeatures generate_features(const LabelVector& labels, std::size_t dim, double noise,
                               std::uint64_t seed);

/// Calibrated two-block settings at the three desk scales.
struct SbmPreset {
  std::string_view name;
  std::size_t n;
  std::size_t target_edges;
  double p_in;
  double p_out;
  double target_homophily;
  std::size_t feature_dim;
  double feature_noise;
};

std::span<const SbmPreset> sbm_presets();
const SbmPreset& sbm_preset(std::string_view name);

}  // namespace dsr
