#include "ldmp/theory.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ldmp {

bool TheoryReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  // Coarse integer entries so that argmax ties actually occur.
  std::uniform_int_distribution<int> value(0, 3);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = value(rng);
  return out;
}

}  // namespace

TheoryReport verify_theory(const TheoryOptions& options) {
  if (options.trials < 1 || options.m_max < 1) throw InputError("theory check needs trials >= 1 and m_max >= 1");
  TheoryReport report;
  Rng rng = make_stream(options.seed, StreamRole::Theory, 0, 1);
  std::uniform_int_distribution<int> dim_m(1, 5);
  std::uniform_int_distribution<int> dim_k(1, 4);

  long inclusion_ok = 0;
  long union_ok = 0;
  long potential_ok = 0;
  for (long trial = 0; trial < options.trials; ++trial) {
    const int m = dim_m(rng);
    const int k = dim_k(rng);
    const Eigen::MatrixXd q = random_matrix(m, k, rng);
    const Eigen::VectorXd v = random_matrix(k, 1, rng);
    if (check_theorem1(q, v)) ++inclusion_ok;
    ActionSet expected = reachable_set(q);
    expected.insert(greedy_action(v.transpose(), 0));
    if (reachable_set(ext(q, v)) == expected) ++union_ok;

    QTensor tensor{q, random_matrix(m, k, rng)};
    const double before = steering_potential(tensor);
    tensor[0] = ext(tensor[0], v);
    // the other agent keeps m rows; the product formula is per agent
    if (steering_potential(tensor) >= before) ++potential_ok;
  }

  auto add = [&](std::string name, long ok, long total) {
    report.checks.push_back({std::move(name), ok == total, fmt::format("{}/{} cases", ok, total)});
  };
  add("reachable set grows under row extension", inclusion_ok, options.trials);
  add("extension adds exactly the new row's argmax", union_ok, options.trials);
  add("steering potential non-decreasing under extension", potential_ok, options.trials);

  report.coverage = check_theorem2(options.k, uniform_row_sampler(options.k), options.m_max, options.trials,
                                   options.seed);
  const auto& cov = report.coverage.coverage;
  bool monotone = true;
  for (std::size_t m = 1; m < cov.size(); ++m) {
    // two-sigma Monte-Carlo slack on the difference of two proportions
    const double sigma = std::sqrt((cov[m] * (1 - cov[m]) + cov[m - 1] * (1 - cov[m - 1])) /
                                   static_cast<double>(options.trials));
    if (cov[m] + 2.0 * sigma < cov[m - 1]) monotone = false;
  }
  report.checks.push_back({"coverage non-decreasing in m", monotone, fmt::format("m = 1..{}", cov.size())});
  report.checks.push_back({"full support of row argmax", report.coverage.full_support,
                           report.coverage.full_support ? "every action observed as argmax"
                                                        : "some action never the argmax"});
  if (options.k == 3 && options.m_max >= 50) {
    report.checks.push_back({"coverage(m=50) > 0.999", cov[49] > 0.999, fmt::format("coverage = {}", cov[49])});
  }
  return report;
}

std::string coverage_csv(const CoverageCurve& curve) {
  std::string out = "m,coverage\n";
  for (std::size_t m = 0; m < curve.coverage.size(); ++m) out += fmt::format("{},{}\n", m + 1, curve.coverage[m]);
  return out;
}

}  // namespace ldmp
