#pragma once

#include "ptrack/geometry.hpp"

#include <vector>

namespace ptrack {

struct OspaParams {
  double cutoff = 20.0;  // m
  double order = 1.0;

  void validate() const;
};

struct OspaResult {
  double total = 0.0;
  double localization = 0.0;
  double cardinality = 0.0;
};

/// OSPA distance on target positions with its localization and cardinality
/// components. For order 1, total = localization + cardinality.
OspaResult ospa(const std::vector<TargetState>& x, const std::vector<TargetState>& y, const OspaParams& params);

}  // namespace ptrack
