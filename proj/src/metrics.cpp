#include "dsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dsr/error.hpp"

namespace dsr {

double homophily(const WeightedGraph& g, const LabelVector& labels, bool weighted) {
  if (labels.ids.size() != g.num_nodes()) {
    throw InputError("label vector has " + std::to_string(labels.ids.size()) + " entries for " +
                     std::to_string(g.num_nodes()) + " nodes");
  }
  if (g.num_edges() == 0) throw InputError("homophily of a graph without edges");
  double same = 0.0;
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const double w = weighted ? e.w : 1.0;
    total += w;
    if (labels.ids[e.u] == labels.ids[e.v]) same += w;
  }
  return same / total;
}

double spectral_gap(const WeightedGraph& g, const EigenOptions& options) {
  if (g.num_nodes() < 2) throw InputError("spectral gap needs at least two nodes");
  if (connected_components(g).count > 1) return 0.0;
  return fiedler_vector(g, options).value;
}

double sorted_quantile(std::span<const double> sorted, double fraction) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double pos = fraction * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

ErSummary er_distribution_summary(std::span<const double> samples) {
  if (samples.empty()) throw InputError("resistance summary of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("resistance samples must be finite and >= 0");
  }
  std::sort(sorted.begin(), sorted.end());
  ErSummary s;
  s.count = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
  s.median = sorted_quantile(sorted, 0.5);
  s.p10 = sorted_quantile(sorted, 0.1);
  s.p90 = sorted_quantile(sorted, 0.9);
  s.max = sorted.back();
  s.histogram.assign(ErSummary::kBins, 0);
  for (double v : sorted) {
    std::size_t bin = 0;
    if (s.max > 0.0) {
      bin = std::min(ErSummary::kBins - 1,
                     static_cast<std::size_t>(v / s.max * static_cast<double>(ErSummary::kBins)));
    }
    ++s.histogram[bin];
  }
  return s;
}

}  // namespace dsr
