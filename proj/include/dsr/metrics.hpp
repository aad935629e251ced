#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsr/graph.hpp"
#include "dsr/node_data.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

/// Fraction of edges whose endpoints share a label. With `weighted` each
/// edge counts with its weight instead of once.
double homophily(const WeightedGraph& g, const LabelVector& labels, bool weighted = false);

/// lambda_2 of L, or 0 for a disconnected graph. Throws InputError for n < 2.
double spectral_gap(const WeightedGraph& g, const EigenOptions& options = {});

struct ErSummary {
  static constexpr std::size_t kBins = 32;

  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  std::vector<std::size_t> histogram;  // kBins equal bins on [0, max]
};

/// Percentiles use linear interpolation between order statistics.
ErSummary er_distribution_summary(std::span<const double> samples);

/// Percentile in [0, 1] of an ascending sample, linear interpolation.
double sorted_quantile(std::span<const double> sorted, double fraction);

}  // namespace dsr
