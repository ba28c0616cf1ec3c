#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldmp/braess.hpp"
#include "ldmp/qlearner.hpp"

namespace ldmp {

using ActionDistribution = Eigen::VectorXd;
/// One recommendation index in [0, m) per agent.
using RecommendationVector = Eigen::VectorXi;

/// p_a = count(a) / N.
ActionDistribution action_distribution(const ActionProfile& profile, int k);

/// D_KL(p || p~*) with p~* = (p* + delta) / (1 + k delta). Terms with
/// p_a = 0 contribute nothing.
double kl_to_target(const ActionDistribution& p, const ActionDistribution& p_star, double delta = 1e-6);

/// Fraction of agents whose greedy action in their recommended state is
/// that state. Requires m = k; throws UndefinedMetric otherwise.
double alignment(const RecommendationVector& recs, const QTensor& tensor);

struct RunRecord {
  long step = 0;
  double epsilon = 0.0;
  double welfare_raw = 0.0;
  double welfare_rescaled = 0.0;
  ActionCounts counts;
  std::optional<double> alignment;
  double kl = 0.0;

  /// Field invariants: counts sum to N, rescaled welfare and alignment in [0,1].
  bool valid(int num_agents) const;
};

struct SimplexPoint {
  Eigen::Vector3d point;         // (frac_up, frac_down, frac_cross)
  Eigen::Vector3d displacement;  // point(t+1) - point(t); zero at the last step
};

/// Barycentric action-profile trajectory for augmented-network runs.
std::vector<SimplexPoint> simplex_trajectory(const std::vector<RunRecord>& records);

/// Mean Euclidean distance from the trajectory points in [begin, end) to `target`.
double mean_distance_to(const std::vector<SimplexPoint>& trajectory, const Eigen::Vector3d& target,
                        std::size_t begin, std::size_t end);

/// Exact column order: run_id,rep,step,epsilon,welfare_raw,welfare_rescaled,
/// n_up,n_down,n_cross,alignment,kl
extern const char* const kRunCsvHeader;

std::string format_run_row(const std::string& run_id, int rep, const RunRecord& record);

std::string format_simplex_row(long step, const SimplexPoint& point);
extern const char* const kSimplexCsvHeader;

/// Mean of welfare_rescaled over records [begin, end).
double mean_rescaled_welfare(const std::vector<RunRecord>& records, std::size_t begin, std::size_t end);

}  // namespace ldmp
