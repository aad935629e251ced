#include "dsr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "dsr/error.hpp"

namespace dsr::linalg {

Eigen::SparseMatrix<double> laplacian_matrix(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(4 * g.num_edges());
  for (const Edge& e : g.edges()) {
    entries.emplace_back(e.u, e.u, e.w);
    entries.emplace_back(e.v, e.v, e.w);
    entries.emplace_back(e.u, e.v, -e.w);
    entries.emplace_back(e.v, e.u, -e.w);
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(entries.begin(), entries.end());
  return L;
}

Eigen::MatrixXd dense_laplacian(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    L(e.u, e.u) += e.w;
    L(e.v, e.v) += e.w;
    L(e.u, e.v) -= e.w;
    L(e.v, e.u) -= e.w;
  }
  return L;
}

void project_out_ones(Eigen::Ref<Eigen::VectorXd> x) {
  if (x.size() == 0) return;
  x.array() -= x.mean();
}

std::size_t thread_count() {
  const char* raw = std::getenv("DSR_THREADS");
  if (raw == nullptr) return 1;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (end == raw || value < 1) return 1;
  return static_cast<std::size_t>(value);
}

LaplacianSolver::LaplacianSolver(const WeightedGraph& g, double relative_tolerance,
                                 std::size_t max_iterations)
    : laplacian_(laplacian_matrix(g)) {
  cg_.setTolerance(relative_tolerance);
  const std::size_t cap = max_iterations > 0 ? max_iterations : 10 * g.num_nodes() + 100;
  cg_.setMaxIterations(static_cast<Eigen::Index>(cap));
  cg_.compute(laplacian_);
}

LaplacianSolver::Result LaplacianSolver::solve(Eigen::VectorXd b) {
  if (b.size() != laplacian_.rows()) throw InputError("right-hand side has the wrong length");
  project_out_ones(b);
  Result out;
  if (b.norm() == 0.0) {
    out.x = Eigen::VectorXd::Zero(b.size());
    out.converged = true;
    return out;
  }
  out.x = cg_.solve(b);
  project_out_ones(out.x);
  out.iterations = static_cast<std::size_t>(cg_.iterations());
  out.relative_residual = (b - laplacian_ * out.x).norm() / b.norm();
  out.converged = cg_.info() == Eigen::Success;
  return out;
}

Eigen::MatrixXd laplacian_pseudoinverse(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const double shift = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd A = dense_laplacian(g);
  A.array() += shift;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("Laplacian is singular after the rank-one shift; graph is disconnected");
  }
  Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(n, n));
  P.array() -= shift;
  return P;
}

LanczosResult lanczos_largest(const Operator& op, Eigen::VectorXd start, bool deflate_ones,
                              double tolerance, std::size_t basis_size,
                              std::size_t max_applications) {
  const Eigen::Index n = start.size();
  LanczosResult out;
  if (n == 0) throw InputError("Lanczos on an empty operator");
  if (deflate_ones) project_out_ones(start);
  if (start.norm() == 0.0) throw InputError("Lanczos start vector is zero after deflation");
  start.normalize();

  const Eigen::Index usable = deflate_ones ? n - 1 : n;
  const Eigen::Index k_max =
      std::max<Eigen::Index>(1, std::min<Eigen::Index>(static_cast<Eigen::Index>(basis_size), usable));

  Eigen::VectorXd current = std::move(start);
  Eigen::VectorXd w(n);
  while (true) {
    Eigen::MatrixXd V(n, k_max + 1);
    std::vector<double> alpha;
    std::vector<double> beta;
    V.col(0) = current;
    double last_beta = 0.0;
    Eigen::Index steps = 0;
    for (Eigen::Index j = 0; j < k_max; ++j) {
      op(V.col(j), w);
      ++out.applications;
      if (deflate_ones) project_out_ones(w);
      const double a = V.col(j).dot(w);
      alpha.push_back(a);
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd coeff = V.leftCols(j + 1).transpose() * w;
        w.noalias() -= V.leftCols(j + 1) * coeff;
      }
      if (deflate_ones) project_out_ones(w);
      last_beta = w.norm();
      steps = j + 1;
      if (last_beta <= 1e-14 * std::max(1.0, std::abs(a)) || j + 1 == k_max) break;
      beta.push_back(last_beta);
      V.col(j + 1) = w / last_beta;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index i = 0; i < steps; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < steps) {
        T(i, i + 1) = beta[static_cast<std::size_t>(i)];
        T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    const double theta = small.eigenvalues()(steps - 1);
    const Eigen::VectorXd s = small.eigenvectors().col(steps - 1);
    current = V.leftCols(steps) * s;
    if (deflate_ones) project_out_ones(current);
    current.normalize();

    out.value = theta;
    out.vector = current;
    out.ritz_residual = last_beta * std::abs(s(steps - 1));
    const bool invariant = last_beta <= 1e-14 * std::max(1.0, std::abs(theta));
    if (invariant || out.ritz_residual <= tolerance * std::max(1e-300, std::abs(theta))) {
      out.converged = true;
      return out;
    }
    if (out.applications >= max_applications) return out;
  }
}

}  // namespace dsr::linalg
