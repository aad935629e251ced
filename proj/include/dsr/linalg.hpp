#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <functional>

#include "dsr/graph.hpp"

namespace dsr::linalg {

Eigen::SparseMatrix<double> laplacian_matrix(const WeightedGraph& g);
Eigen::MatrixXd dense_laplacian(const WeightedGraph& g);

/// Removes the component along the all-ones vector.
void project_out_ones(Eigen::Ref<Eigen::VectorXd> x);

/// Worker count from DSR_THREADS (default 1, clamped to >= 1).
std::size_t thread_count();

/// Jacobi-preconditioned conjugate gradient for L x = b on a connected
/// graph. Right-hand sides are projected off the all-ones vector and the
/// returned solution has zero mean. Not thread-safe; use one per worker.
class LaplacianSolver {
 public:
  struct Result {
    Eigen::VectorXd x;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
  };

  LaplacianSolver(const WeightedGraph& g, double relative_tolerance,
                  std::size_t max_iterations = 0);

  Result solve(Eigen::VectorXd b);
  std::size_t size() const { return static_cast<std::size_t>(laplacian_.rows()); }

 private:
  Eigen::SparseMatrix<double> laplacian_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg_;
};

/// Dense L^+ of a connected graph via (L + J/n)^{-1} - J/n.
Eigen::MatrixXd laplacian_pseudoinverse(const WeightedGraph& g);

using Operator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  double ritz_residual = 0.0;
  std::size_t applications = 0;
  bool converged = false;
};

/// Largest eigenpair of a symmetric operator by explicitly restarted Lanczos
/// with full reorthogonalization. With `deflate_ones` the iteration is kept
/// orthogonal to the all-ones vector.
LanczosResult lanczos_largest(const Operator& op, Eigen::VectorXd start, bool deflate_ones,
                              double tolerance, std::size_t basis_size,
                              std::size_t max_applications);

}  // namespace dsr::linalg
