#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldmp/steering.hpp"

namespace ldmp {

struct TheoryOptions {
  long trials = 10000;  // random cases per property and Monte-Carlo trials
  int m_max = 50;
  int k = 3;
  std::uint64_t seed = 1;
};

struct TheoryCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TheoryReport {
  std::vector<TheoryCheck> checks;
  CoverageCurve coverage;
  bool all_passed() const;
};

/// Reachability properties on random tables:
///   - R(Q) is contained in R(Ext(Q, v))                   (m <= 5, k <= 4)
///   - R(Ext(Q, v)) = R(Q) | {argmax v}
///   - steering potential never drops when one agent's table is extended
///   - coverage curve non-decreasing in m and coverage(m_max) > 0.999 for k = 3
TheoryReport verify_theory(const TheoryOptions& options);

/// "m,coverage" rows, m = 1..m_max.
std::string coverage_csv(const CoverageCurve& curve);

}  // namespace ldmp
