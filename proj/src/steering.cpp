#include "ldmp/steering.hpp"

namespace ldmp {

CoverageCurve check_theorem2(int k, const RowSampler& sampler, int m_max, long trials,
                             std::uint64_t seed) {
  if (k < 1 || k > 64) throw InputError("coverage check needs 1 <= k <= 64");
  if (m_max < 1 || trials < 1) throw InputError("coverage check needs m_max >= 1 and trials >= 1");

  std::vector<long> hits(static_cast<std::size_t>(m_max), 0);
  std::vector<long> argmax_counts(static_cast<std::size_t>(k), 0);
  const ActionSet all = ActionSet::full(k);

  for (long trial = 0; trial < trials; ++trial) {
    Rng rng = make_stream(seed, StreamRole::Theory, static_cast<std::uint64_t>(trial));
    ActionSet reached;
    for (int m = 1; m <= m_max; ++m) {
      const Eigen::VectorXd v = sampler(rng);
      if (v.size() != k) throw InputError("row sampler returned the wrong length");
      const int a = greedy_action(v.transpose(), 0);
      ++argmax_counts[static_cast<std::size_t>(a)];
      reached.insert(a);
      if (reached == all) ++hits[static_cast<std::size_t>(m - 1)];
    }
  }

  CoverageCurve curve;
  curve.k = k;
  curve.trials = trials;
  const double total_rows = static_cast<double>(trials) * m_max;
  for (long h : hits) curve.coverage.push_back(static_cast<double>(h) / static_cast<double>(trials));
  for (long c : argmax_counts) {
    curve.argmax_frequency.push_back(static_cast<double>(c) / total_rows);
    if (c == 0) curve.full_support = false;
  }
  return curve;
}

RowSampler uniform_row_sampler(int k) {
  return [k](Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd v(k);
    for (int a = 0; a < k; ++a) v[a] = dist(rng);
    return v;
  };
}

}  // namespace ldmp
