#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace dsr {

/// Row-per-node feature matrix.
struct NodeFeatures {
  Eigen::MatrixXd rows;

  std::size_t num_nodes() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }
};

/// Dense class ids per node.
struct LabelVector {
  std::vector<std::size_t> ids;
  std::size_t classes = 0;

  /// Validates ids and derives the class count as max id + 1.
  static LabelVector from_ids(std::vector<std::size_t> ids);
};

}  // namespace dsr
