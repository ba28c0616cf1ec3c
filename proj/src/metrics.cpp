#include "ldmp/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ldmp {

const char* const kRunCsvHeader =
    "run_id,rep,step,epsilon,welfare_raw,welfare_rescaled,n_up,n_down,n_cross,alignment,kl";
const char* const kSimplexCsvHeader = "step,frac_up,frac_down,frac_cross,d_up,d_down,d_cross";

ActionDistribution action_distribution(const ActionProfile& profile, int k) {
  if (profile.size() == 0) throw InputError("action distribution of an empty profile");
  ActionDistribution p = ActionDistribution::Zero(k);
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    if (profile[i] < 0 || profile[i] >= k) throw InputError("action out of range in profile");
    p[profile[i]] += 1.0;
  }
  return p / static_cast<double>(profile.size());
}

double kl_to_target(const ActionDistribution& p, const ActionDistribution& p_star, double delta) {
  if (!(delta > 0.0)) throw InputError("KL smoothing must be positive");
  if (p.size() != p_star.size()) throw InputError("KL between distributions of different arity");
  const double k = static_cast<double>(p.size());
  double kl = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    const double smoothed = (p_star[a] + delta) / (1.0 + k * delta);
    kl += p[a] * std::log(p[a] / smoothed);
  }
  return kl;
}

double alignment(const RecommendationVector& recs, const QTensor& tensor) {
  if (tensor.empty() || recs.size() != static_cast<Eigen::Index>(tensor.size())) {
    throw InputError("alignment: one recommendation per agent required");
  }
  if (tensor.front().rows() != tensor.front().cols()) {
    throw UndefinedMetric("alignment needs m = k (states must name actions)");
  }
  long aligned = 0;
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const int s = recs[static_cast<Eigen::Index>(i)];
    if (greedy_action(tensor[i], s) == s) ++aligned;
  }
  return static_cast<double>(aligned) / static_cast<double>(tensor.size());
}

bool RunRecord::valid(int num_agents) const {
  if ((counts.array() < 0).any() || counts.sum() != num_agents) return false;
  if (!(welfare_rescaled >= 0.0 && welfare_rescaled <= 1.0)) return false;
  if (alignment && !(*alignment >= 0.0 && *alignment <= 1.0)) return false;
  return std::isfinite(welfare_raw) && std::isfinite(kl) && kl >= 0.0;
}

std::vector<SimplexPoint> simplex_trajectory(const std::vector<RunRecord>& records) {
  std::vector<SimplexPoint> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.counts.size() != 3) throw InputError("simplex trajectory needs augmented-network records");
    out.push_back({r.counts.cast<double>() / static_cast<double>(r.counts.sum()), Eigen::Vector3d::Zero()});
  }
  for (std::size_t t = 0; t + 1 < out.size(); ++t) out[t].displacement = out[t + 1].point - out[t].point;
  return out;
}

double mean_distance_to(const std::vector<SimplexPoint>& trajectory, const Eigen::Vector3d& target,
                        std::size_t begin, std::size_t end) {
  if (begin >= end || end > trajectory.size()) throw InputError("empty or out-of-range trajectory window");
  double total = 0.0;
  for (std::size_t t = begin; t < end; ++t) total += (trajectory[t].point - target).norm();
  return total / static_cast<double>(end - begin);
}

std::string format_run_row(const std::string& run_id, int rep, const RunRecord& r) {
  const std::string cross = r.counts.size() > 2 ? fmt::format("{}", r.counts[kCross]) : "";
  const std::string align = r.alignment ? fmt::format("{}", *r.alignment) : "";
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", run_id, rep, r.step, r.epsilon, r.welfare_raw,
                     r.welfare_rescaled, r.counts[kUp], r.counts[kDown], cross, align, r.kl);
}

std::string format_simplex_row(long step, const SimplexPoint& p) {
  return fmt::format("{},{},{},{},{},{},{}", step, p.point[0], p.point[1], p.point[2], p.displacement[0],
                     p.displacement[1], p.displacement[2]);
}

double mean_rescaled_welfare(const std::vector<RunRecord>& records, std::size_t begin, std::size_t end) {
  if (begin >= end || end > records.size()) throw InputError("empty or out-of-range record window");
  double total = 0.0;
  for (std::size_t t = begin; t < end; ++t) total += records[t].welfare_rescaled;
  return total / static_cast<double>(end - begin);
}

}  // namespace ldmp
