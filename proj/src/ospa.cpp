#include "ptrack/ospa.hpp"

#include "ptrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptrack {

void OspaParams::validate() const {
  if (!(cutoff > 0.0)) throw std::invalid_argument("OspaParams: cutoff must be > 0");
  if (!(order >= 1.0)) throw std::invalid_argument("OspaParams: order must be >= 1");
}

OspaResult ospa(const std::vector<TargetState>& x, const std::vector<TargetState>& y, const OspaParams& params) {
  params.validate();
  const auto& small = x.size() <= y.size() ? x : y;
  const auto& large = x.size() <= y.size() ? y : x;
  const auto m = small.size();
  const auto n = large.size();
  if (n == 0) return {};

  const double c = params.cutoff;
  const double p = params.order;
  double matched = 0.0;
  if (m > 0) {
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = (position_of(small[i]) - position_of(large[j])).norm();
        cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(std::min(d, c), p);
      }
    }
    matched = solve_assignment(cost).cost;
  }
  const double unmatched = std::pow(c, p) * static_cast<double>(n - m);
  const double nn = static_cast<double>(n);

  OspaResult out;
  out.total = std::pow((matched + unmatched) / nn, 1.0 / p);
  out.localization = std::pow(matched / nn, 1.0 / p);
  out.cardinality = std::pow(unmatched / nn, 1.0 / p);
  return out;
}

}  // namespace ptrack
