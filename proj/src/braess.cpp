#include "ldmp/braess.hpp"

#include <algorithm>

#include "ldmp/error.hpp"

namespace ldmp {

std::string_view to_string(Network net) {
  return net == Network::Initial ? "initial" : "augmented";
}

Network parse_network(std::string_view name) {
  if (name == "initial") return Network::Initial;
  if (name == "augmented") return Network::Augmented;
  throw InputError("unknown network '" + std::string(name) + "' (expected initial|augmented)");
}

NetworkSpec make_network(Network variant, int num_agents) {
  if (num_agents < 1) throw InputError("network needs at least one agent");
  return NetworkSpec{variant, num_agents};
}

namespace {

void check_counts(const NetworkSpec& spec, const ActionCounts& counts) {
  if (counts.size() != spec.num_actions()) {
    throw InputError("counts arity " + std::to_string(counts.size()) + " does not match k=" +
                     std::to_string(spec.num_actions()));
  }
  if ((counts.array() < 0).any() || counts.sum() != spec.num_agents) {
    throw InputError("counts must be non-negative and sum to N");
  }
}

}  // namespace

ActionCounts count_actions(const NetworkSpec& spec, const ActionProfile& profile) {
  const int k = spec.num_actions();
  if (profile.size() != spec.num_agents) {
    throw InputError("profile length does not match N");
  }
  ActionCounts counts = ActionCounts::Zero(k);
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    const int a = profile[i];
    if (a < 0 || a >= k) throw InputError("action out of range in profile");
    ++counts[a];
  }
  return counts;
}

Eigen::VectorXd latencies(const NetworkSpec& spec, const ActionCounts& counts) {
  check_counts(spec, counts);
  const double n = spec.num_agents;
  if (spec.variant == Network::Initial) {
    return Eigen::Vector2d(1.0 + counts[kUp] / n, 1.0 + counts[kDown] / n);
  }
  const double upper = (counts[kUp] + counts[kCross]) / n;
  const double lower = (counts[kDown] + counts[kCross]) / n;
  return Eigen::Vector3d(1.0 + upper, 1.0 + lower, upper + lower);
}

Eigen::VectorXd rewards(const NetworkSpec& spec, const ActionProfile& profile) {
  const Eigen::VectorXd lat = latencies(spec, count_actions(spec, profile));
  Eigen::VectorXd r(profile.size());
  for (Eigen::Index i = 0; i < profile.size(); ++i) r[i] = -lat[profile[i]];
  return r;
}

double social_welfare(const Eigen::Ref<const Eigen::VectorXd>& rewards) {
  if (rewards.size() == 0) throw InputError("social welfare of an empty reward vector");
  return rewards.mean();
}

double rescale_welfare(double welfare) {
  return std::clamp((welfare + 2.0) / 0.5, 0.0, 1.0);
}

double mean_latency(const NetworkSpec& spec, const ActionCounts& counts) {
  const Eigen::VectorXd lat = latencies(spec, counts);
  return counts.cast<double>().dot(lat) / spec.num_agents;
}

std::int64_t scaled_total_latency(const NetworkSpec& spec, const ActionCounts& counts) {
  check_counts(spec, counts);
  const std::int64_t n = spec.num_agents;
  const std::int64_t u = counts[kUp];
  const std::int64_t d = counts[kDown];
  if (spec.variant == Network::Initial) return u * (n + u) + d * (n + d);
  const std::int64_t c = counts[kCross];
  return u * (n + u + c) + d * (n + d + c) + c * (u + d + 2 * c);
}

TargetAssignment social_optimum(const NetworkSpec& spec) {
  TargetAssignment target = TargetAssignment::Zero(spec.num_actions());
  target[kUp] = (spec.num_agents + 1) / 2;
  target[kDown] = spec.num_agents / 2;
  return target;
}

}  // namespace ldmp
