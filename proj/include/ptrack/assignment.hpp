#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ptrack {

struct Assignment {
  /// Column matched to each row, -1 when the row is unmatched.
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost matching of size min(rows, cols) (Hungarian method with
/// potentials, O(n^2 m)). Costs must be finite and nonnegative.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace ptrack
