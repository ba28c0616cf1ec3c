#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ldmp {

// Action indices shared by both networks. Initial has only up/down.
inline constexpr int kUp = 0;
inline constexpr int kDown = 1;
inline constexpr int kCross = 2;

enum class Network { Initial, Augmented };

std::string_view to_string(Network net);
Network parse_network(std::string_view name);

/// Which Braess variant is played and by how many agents.
struct NetworkSpec {
  Network variant = Network::Augmented;
  int num_agents = 100;

  /// k: 2 for the initial network, 3 for the augmented one.
  int num_actions() const { return variant == Network::Initial ? 2 : 3; }
};

NetworkSpec make_network(Network variant, int num_agents);

/// Length-N vector of chosen actions, each in [0, k).
using ActionProfile = Eigen::VectorXi;
/// Per-action occupancy, sums to N.
using ActionCounts = Eigen::VectorXi;
/// Desired per-action occupancy d*.
using TargetAssignment = Eigen::VectorXi;

ActionCounts count_actions(const NetworkSpec& spec, const ActionProfile& profile);

/// Per-action travel time for the given occupancy.
///   augmented: l(u) = 1 + (n_u+n_c)/N, l(d) = 1 + (n_d+n_c)/N,
///              l(c) = (n_u+n_c)/N + (n_d+n_c)/N
///   initial:   l(u) = 1 + n_u/N,       l(d) = 1 + n_d/N
Eigen::VectorXd latencies(const NetworkSpec& spec, const ActionCounts& counts);

/// r_i = -l(a_i) under the counts induced by the profile.
Eigen::VectorXd rewards(const NetworkSpec& spec, const ActionProfile& profile);

/// Mean reward. Throws InputError on an empty vector.
double social_welfare(const Eigen::Ref<const Eigen::VectorXd>& rewards);

/// Affine map [-2, -1.5] -> [0, 1], clamped.
double rescale_welfare(double welfare);

/// Occupancy-weighted mean latency, i.e. -social_welfare(rewards).
double mean_latency(const NetworkSpec& spec, const ActionCounts& counts);

/// N * sum_a n_a l_a as an exact integer. Orders count vectors by mean
/// latency without floating-point ties.
std::int64_t scaled_total_latency(const NetworkSpec& spec, const ActionCounts& counts);

/// Half up, half down, nobody crossing. The odd agent goes up.
TargetAssignment social_optimum(const NetworkSpec& spec);

}  // namespace ldmp
