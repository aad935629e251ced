#include "dsr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsr/error.hpp"
#include "dsr/linalg.hpp"
#include "dsr/random.hpp"

namespace dsr {
namespace {

void fix_sign(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

double residual_of(const WeightedGraph& g, const Eigen::VectorXd& v, double value) {
  Eigen::VectorXd Lv(v.size());
  laplacian_apply(g, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
                  std::span<double>(Lv.data(), static_cast<std::size_t>(Lv.size())));
  return (Lv - value * v).norm();
}

double rayleigh(const WeightedGraph& g, const Eigen::VectorXd& v) {
  return laplacian_quadratic_form(
             g, std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))) /
         v.squaredNorm();
}

Eigen::VectorXd gaussian_vector(Eigen::Index n, std::uint64_t seed, std::string_view tag) {
  Rng rng = make_rng(seed, tag);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
  return x;
}

// Eigenpair at sorted position `index` of a dense solve; degenerate
// eigenspaces are resolved by projecting a fixed random vector onto them.
EigenPair dense_pair(const WeightedGraph& g, Eigen::Index index, const EigenOptions& options,
                     std::string_view tag) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(linalg::dense_laplacian(g));
  if (solver.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::Index n = values.size();
  const double scale = std::max(1.0, std::abs(values(n - 1)));
  const double gap = 1e-9 * scale;
  Eigen::Index lo = index;
  Eigen::Index hi = index;
  // The index-0 eigenvalue (all-ones) is never merged into a Fiedler space.
  const Eigen::Index floor = index >= 1 ? 1 : 0;
  while (lo > floor && std::abs(values(lo - 1) - values(index)) <= gap) --lo;
  while (hi + 1 < n && std::abs(values(hi + 1) - values(index)) <= gap) ++hi;

  EigenPair out;
  if (lo == hi) {
    out.vector = solver.eigenvectors().col(index);
  } else {
    const Eigen::MatrixXd U = solver.eigenvectors().middleCols(lo, hi - lo + 1);
    const Eigen::VectorXd r = gaussian_vector(n, options.seed, tag);
    out.vector = U * (U.transpose() * r);
    out.vector.normalize();
  }
  fix_sign(out.vector);
  out.value = rayleigh(g, out.vector);
  out.residual = residual_of(g, out.vector, out.value);
  return out;
}

void require_connected(const WeightedGraph& g) {
  if (g.num_nodes() < 2) throw InputError("Fiedler vector needs at least two nodes");
  if (connected_components(g).count != 1) {
    throw InputError("Fiedler vector needs a connected graph; split components first");
  }
}

}  // namespace

EigenPair fiedler_vector(const WeightedGraph& g, const EigenOptions& options) {
  require_connected(g);
  const std::size_t n = g.num_nodes();
  if (n <= options.dense_cap) return dense_pair(g, 1, options, "fiedler-degenerate");

  // Shift-invert Lanczos: the largest eigenvalue of L^+ on the complement of
  // the all-ones vector is 1 / lambda_2.
  linalg::LaplacianSolver solver(g, 1e-12);
  std::size_t matvecs = 0;
  const linalg::Operator apply_inverse = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    auto result = solver.solve(in);
    matvecs += result.iterations + 1;
    out = std::move(result.x);
  };
  const std::size_t budget = 50 * n;
  Eigen::VectorXd start = gaussian_vector(static_cast<Eigen::Index>(n), options.seed, "fiedler-start");
  double inner_tolerance = options.tolerance;
  EigenPair out;
  out.converged = false;
  for (int round = 0; round < 6 && matvecs < budget; ++round) {
    const auto lanczos =
        linalg::lanczos_largest(apply_inverse, start, true, inner_tolerance, 30, budget);
    out.vector = lanczos.vector;
    out.value = rayleigh(g, out.vector);
    out.residual = residual_of(g, out.vector, out.value);
    if (out.residual <= options.tolerance * std::max(1.0, out.value)) {
      out.converged = true;
      break;
    }
    start = out.vector;
    inner_tolerance *= 1e-2;
  }
  fix_sign(out.vector);
  out.matvecs = matvecs;
  return out;
}

EigenPair leading_eigenpair(const WeightedGraph& g, const EigenOptions& options) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw InputError("leading eigenpair of an empty node set");
  if (n <= options.dense_cap) {
    return dense_pair(g, static_cast<Eigen::Index>(n) - 1, options, "leading-degenerate");
  }
  std::size_t matvecs = 0;
  const linalg::Operator apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out.resize(in.size());
    laplacian_apply(g, std::span<const double>(in.data(), n), std::span<double>(out.data(), n));
    ++matvecs;
  };
  const std::size_t budget = 50 * n;
  Eigen::VectorXd start = gaussian_vector(static_cast<Eigen::Index>(n), options.seed, "leading-start");
  double inner_tolerance = options.tolerance;
  EigenPair out;
  out.converged = false;
  for (int round = 0; round < 6 && matvecs < budget; ++round) {
    const auto lanczos = linalg::lanczos_largest(apply, start, false, inner_tolerance, 60, budget);
    out.vector = lanczos.vector;
    out.value = rayleigh(g, out.vector);
    out.residual = residual_of(g, out.vector, out.value);
    if (out.residual <= options.tolerance * std::max(1.0, out.value)) {
      out.converged = true;
      break;
    }
    start = out.vector;
    inner_tolerance *= 1e-2;
  }
  fix_sign(out.vector);
  out.matvecs = matvecs;
  return out;
}

SpectrumSummary full_spectrum(const WeightedGraph& g, std::size_t cap) {
  const std::size_t n = g.num_nodes();
  if (n > cap) {
    throw InputError("graph has " + std::to_string(n) + " nodes, above the dense spectrum cap of " +
                     std::to_string(cap) + "; use fiedler_vector/leading_eigenpair instead");
  }
  SpectrumSummary out;
  out.n = n;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(linalg::dense_laplacian(g),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

SimilarityReport spectral_similarity_check(const WeightedGraph& g, const WeightedGraph& h,
                                           double epsilon, std::size_t trials,
                                           std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (h.num_nodes() != n) throw InputError("similarity check needs graphs on the same node set");
  if (trials == 0) throw InputError("similarity check needs at least one trial");

  std::vector<Eigen::VectorXd> probes;
  probes.reserve(trials + 2);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = make_rng(seed, "similarity-probe", i);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) x(static_cast<Eigen::Index>(j)) = normal(rng);
    linalg::project_out_ones(x);
    probes.push_back(std::move(x));
  }
  if (n >= 2 && connected_components(g).count == 1) probes.push_back(fiedler_vector(g).vector);
  if (n >= 1) probes.push_back(leading_eigenpair(g).vector);

  SimilarityReport report;
  report.epsilon_target = epsilon;
  report.max_upper_ratio = -std::numeric_limits<double>::infinity();
  report.min_lower_ratio = std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (const Eigen::VectorXd& x : probes) {
    ++report.trials;
    const std::span<const double> view(x.data(), n);
    const double base = laplacian_quadratic_form(g, view);
    if (base < 1e-12) {
      ++report.skipped;
      continue;
    }
    const double ratio = laplacian_quadratic_form(h, view) / base;
    report.max_upper_ratio = std::max(report.max_upper_ratio, ratio);
    report.min_lower_ratio = std::min(report.min_lower_ratio, ratio);
    ++used;
  }
  if (used == 0) {
    report.max_upper_ratio = 1.0;
    report.min_lower_ratio = 1.0;
    report.epsilon_observed = h.num_edges() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    report.epsilon_observed =
        std::max(report.max_upper_ratio - 1.0, 1.0 - report.min_lower_ratio);
  }
  report.pass = report.epsilon_observed <= epsilon;
  return report;
}

double dtw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("DTW needs two nonempty sequences");
  const std::size_t rows = a.size();
  const std::size_t cols = b.size();
  // Each cell keeps (accumulated cost, path length); ties on cost prefer the
  // shorter path.
  struct Cell {
    double cost;
    std::size_t length;
  };
  const auto better = [](const Cell& x, const Cell& y) {
    return x.cost < y.cost || (x.cost == y.cost && x.length < y.length);
  };
  std::vector<Cell> prev(cols);
  std::vector<Cell> curr(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double local = std::abs(a[i] - b[j]);
      if (i == 0 && j == 0) {
        curr[j] = {local, 1};
        continue;
      }
      Cell best{std::numeric_limits<double>::infinity(), 0};
      if (i > 0 && better(prev[j], best)) best = prev[j];
      if (j > 0 && better(curr[j - 1], best)) best = curr[j - 1];
      if (i > 0 && j > 0 && better(prev[j - 1], best)) best = prev[j - 1];
      curr[j] = {best.cost + local, best.length + 1};
    }
    std::swap(prev, curr);
  }
  const Cell& end = prev[cols - 1];
  return end.cost / static_cast<double>(end.length);
}

double spectral_distance(const SpectrumSummary& a, const SpectrumSummary& b) {
  if (a.eigenvalues.empty() || b.eigenvalues.empty()) {
    throw InputError("spectral distance needs nonempty spectra");
  }
  if (a.eigenvalues.size() == b.eigenvalues.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) {
      const double d = a.eigenvalues[i] - b.eigenvalues[i];
      sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.eigenvalues.size()));
  }
  return dtw_distance(a.eigenvalues, b.eigenvalues);
}

}  // namespace dsr
