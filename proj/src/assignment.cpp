#include "ptrack/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace ptrack {

namespace {

// Rows <= cols. 1-based potentials u (rows) and v (cols); way[] tracks the
// augmenting path.
std::vector<int> hungarian(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  Assignment out;
  if (cost.size() == 0) {
    out.row_to_col.assign(static_cast<std::size_t>(cost.rows()), -1);
    return out;
  }
  if (!cost.allFinite() || (cost.array() < 0.0).any()) {
    throw std::invalid_argument("assignment costs must be finite and nonnegative");
  }

  if (cost.rows() <= cost.cols()) {
    out.row_to_col = hungarian(cost);
  } else {
    const std::vector<int> col_to_row = hungarian(cost.transpose());
    out.row_to_col.assign(static_cast<std::size_t>(cost.rows()), -1);
    for (std::size_t j = 0; j < col_to_row.size(); ++j) {
      if (col_to_row[j] >= 0) out.row_to_col[static_cast<std::size_t>(col_to_row[j])] = static_cast<int>(j);
    }
  }
  for (std::size_t i = 0; i < out.row_to_col.size(); ++i) {
    if (out.row_to_col[i] >= 0) out.cost += cost(static_cast<Eigen::Index>(i), out.row_to_col[i]);
  }
  return out;
}

}  // namespace ptrack
