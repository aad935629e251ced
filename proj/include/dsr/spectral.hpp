#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsr/graph.hpp"

namespace dsr {

/// Laplacian eigenpair. `vector` has unit norm and is sign-fixed so that its
/// largest-magnitude entry is positive.
struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;        // ||L v - value v||_2
  std::size_t matvecs = 0;      // 0 on the dense path
  bool converged = true;
};

struct SpectrumSummary {
  std::vector<double> eigenvalues;  // ascending
  std::size_t n = 0;
  bool truncated = false;
};

struct SimilarityReport {
  std::size_t trials = 0;       // probes evaluated, extremal vectors included
  std::size_t skipped = 0;      // probes with x^T L x below 1e-12
  double max_upper_ratio = 1.0;
  double min_lower_ratio = 1.0;
  double epsilon_observed = 0.0;
  double epsilon_target = 0.0;
  bool pass = true;
};

struct EigenOptions {
  std::size_t dense_cap = 512;      // dense solver at or below this size
  double tolerance = 1e-8;          // relative eigen-residual
  std::uint64_t seed = 0x5eedULL;   // start vectors and degenerate-space picks
};

/// (lambda_2, f) of a connected graph with at least two nodes. When lambda_2
/// is degenerate the returned vector is a fixed generic element of its
/// eigenspace.
EigenPair fiedler_vector(const WeightedGraph& g, const EigenOptions& options = {});

/// (lambda_n, x) for the largest Laplacian eigenvalue.
EigenPair leading_eigenpair(const WeightedGraph& g, const EigenOptions& options = {});

/// All eigenvalues, ascending. Throws InputError when n exceeds `cap`; use
/// the extremal routines above for larger graphs.
SpectrumSummary full_spectrum(const WeightedGraph& g, std::size_t cap = 2000);

/// Empirical (1 +- epsilon) check of x^T L_h x against x^T L_g x over
/// `trials` Gaussian probes (projected off the all-ones vector) plus the
/// Fiedler and leading vectors of g when they exist.
SimilarityReport spectral_similarity_check(const WeightedGraph& g, const WeightedGraph& h,
                                           double epsilon, std::size_t trials,
                                           std::uint64_t seed);

/// Distance between two ascending spectra. Equal lengths: ||a - b||_2 / sqrt(n).
/// Different lengths: dynamic time warping with |a_i - b_j| cost and unit
/// step weights, divided by the number of cells on the optimal warping path.
double spectral_distance(const SpectrumSummary& a, const SpectrumSummary& b);

/// Path-length-normalized DTW used by spectral_distance.
double dtw_distance(std::span<const double> a, std::span<const double> b);

}  // namespace dsr
