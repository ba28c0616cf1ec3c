#include "ldmp/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ldmp {

ArgmaxTable argmax_table(const QTensor& tensor) {
  if (tensor.empty()) throw InputError("empty q-tensor");
  const Eigen::Index m = tensor.front().rows();
  ArgmaxTable out(static_cast<Eigen::Index>(tensor.size()), m);
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    if (tensor[i].rows() != m || tensor[i].cols() != tensor.front().cols()) {
      throw InputError("q-tables in a tensor must share dimensions");
    }
    for (Eigen::Index s = 0; s < m; ++s) out(static_cast<Eigen::Index>(i), s) = greedy_action(tensor[i], s);
  }
  return out;
}

PossibleActions possible_actions(const ArgmaxTable& argmaxes) {
  PossibleActions out(static_cast<std::size_t>(argmaxes.rows()));
  for (Eigen::Index i = 0; i < argmaxes.rows(); ++i)
    for (Eigen::Index s = 0; s < argmaxes.cols(); ++s) out[static_cast<std::size_t>(i)].insert(argmaxes(i, s));
  return out;
}

PossibleActions get_possible_actions(const QTensor& tensor) { return possible_actions(argmax_table(tensor)); }

RecommendationVector constant_recommender(int n, int m) {
  if (n < 1 || m < 1) throw InputError("constant recommender needs n >= 1 and m >= 1");
  const int period = std::min(m, 2);
  RecommendationVector recs(n);
  for (int i = 0; i < n; ++i) recs[i] = i % period;
  return recs;
}

RecommendationVector random_recommender(int n, int m, Rng& rng) {
  if (n < 1 || m < 1) throw InputError("random recommender needs n >= 1 and m >= 1");
  std::uniform_int_distribution<int> pick(0, m - 1);
  RecommendationVector recs(n);
  for (int i = 0; i < n; ++i) recs[i] = pick(rng);
  return recs;
}

RecommendationVector two_step_recommender(TwoStepKind kind, long t, int n) {
  if (t == 0) return RecommendationVector::Constant(n, kind == TwoStepKind::Aligned ? kDown : kUp);
  return constant_recommender(n, 2);
}

// ---------------------------------------------------------------------------

RewardEstimate estimate_reward(const PossibleActions& possible, const NetworkSpec& spec) {
  const int k = spec.num_actions();
  if (static_cast<int>(possible.size()) != spec.num_agents) {
    throw InputError("possible-action sets must cover every agent");
  }

  ActionCounts locked = ActionCounts::Zero(k);
  // free agents bucketed by their possible-action mask
  std::vector<int> by_mask(std::size_t{1} << k, 0);
  int free_agents = 0;
  for (const ActionSet& p : possible) {
    if (p.empty() || !p.subset_of(ActionSet::full(k))) throw InputError("possible-action set out of range");
    if (p.size() == 1) {
      ++locked[p.front()];
    } else {
      ++by_mask[p.bits()];
      ++free_agents;
    }
  }

  // Hall demand per action subset S: free agents whose set lies inside S
  // must all be absorbed by S.
  const std::uint64_t num_subsets = std::uint64_t{1} << k;
  std::vector<int> demand(num_subsets, 0);
  for (std::uint64_t subset = 1; subset < num_subsets; ++subset)
    for (std::uint64_t mask = 1; mask < num_subsets; ++mask)
      if ((mask & ~subset) == 0) demand[subset] += by_mask[mask];

  ActionCounts best;
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  auto consider = [&](const ActionCounts& counts) {
    const std::int64_t cost = scaled_total_latency(spec, counts);
    const bool better = cost < best_cost ||
                        (cost == best_cost && (counts[kUp] > best[kUp] ||
                                               (counts[kUp] == best[kUp] && counts[kDown] > best[kDown])));
    if (better) {
      best_cost = cost;
      best = counts;
    }
  };

  const int max_cross = k == 3 ? free_agents : 0;
  for (int f_cross = 0; f_cross <= max_cross; ++f_cross) {
    const int rest = free_agents - f_cross;
    // feasible f_up forms an interval: every Hall constraint is linear in f_up
    long lo = 0;
    long hi = rest;
    bool feasible = true;
    for (std::uint64_t subset = 1; subset < num_subsets && feasible; ++subset) {
      const int coef = static_cast<int>((subset >> kUp) & 1U) - static_cast<int>((subset >> kDown) & 1U);
      long constant = ((subset >> kDown) & 1U) ? rest : 0;
      if (k == 3 && ((subset >> kCross) & 1U)) constant += f_cross;
      // coef * f_up + constant >= demand
      const long need = demand[subset] - constant;
      if (coef == 1) lo = std::max(lo, need);
      else if (coef == -1) hi = std::min(hi, -need);
      else if (need > 0) feasible = false;
    }
    if (!feasible || lo > hi) continue;

    // For fixed crossing, only n_u^2 + n_d^2 varies: balance up and down.
    const double vertex = (locked[kDown] + rest - locked[kUp]) / 2.0;
    for (long f_up : {static_cast<long>(std::floor(vertex)), static_cast<long>(std::ceil(vertex))}) {
      f_up = std::clamp(f_up, lo, hi);
      ActionCounts counts = locked;
      counts[kUp] += static_cast<int>(f_up);
      counts[kDown] += static_cast<int>(rest - f_up);
      if (k == 3) counts[kCross] += f_cross;
      consider(counts);
    }
  }

  return {best, -latencies(spec, best)};
}

Eigen::MatrixXd estimate_update(const QTensor& tensor, const ArgmaxTable& argmaxes,
                                const Eigen::VectorXd& reward_estimate, const LearnerParams& params) {
  const Eigen::Index n = argmaxes.rows();
  const Eigen::Index m = argmaxes.cols();
  if (static_cast<Eigen::Index>(tensor.size()) != n) throw InputError("argmax table does not match tensor");
  Eigen::MatrixXd delta(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const QTable& q = tensor[static_cast<std::size_t>(i)];
    for (Eigen::Index s = 0; s < m; ++s) {
      const int a = argmaxes(i, s);
      const double future = params.gamma * q.row(s).maxCoeff();
      delta(i, s) = params.alpha * (reward_estimate[a] + future - q(s, a));
    }
  }
  return delta;
}

Priority calculate_priority(const TargetAssignment& target, const ActionCounts& assigned) {
  if (target.size() != assigned.size()) throw InputError("priority: target and assignment arity differ");
  return (target - assigned).cwiseMax(0);
}

SortedTable sort_table(const ArgmaxTable& argmaxes, const Eigen::MatrixXd& delta, int k, SortPhase phase) {
  SortedTable columns(static_cast<std::size_t>(k));
  for (auto& column : columns) column.reserve(static_cast<std::size_t>(argmaxes.size()));
  // Filled in (agent, state) order, so a stable sort on delta alone keeps
  // that order among ties.
  for (Eigen::Index i = 0; i < argmaxes.rows(); ++i)
    for (Eigen::Index s = 0; s < argmaxes.cols(); ++s)
      columns[static_cast<std::size_t>(argmaxes(i, s))].push_back(
          {static_cast<int>(i), static_cast<int>(s), delta(i, s)});

  for (auto& column : columns) {
    if (phase == SortPhase::Min) {
      std::stable_sort(column.begin(), column.end(),
                       [](const Candidate& x, const Candidate& y) { return x.delta < y.delta; });
    } else {
      std::stable_sort(column.begin(), column.end(),
                       [](const Candidate& x, const Candidate& y) { return x.delta > y.delta; });
    }
  }
  return columns;
}

void select_recommendations(const SortedTable& table, const TargetAssignment& target, SortPhase phase,
                            SelectionState& state) {
  const int k = static_cast<int>(table.size());
  std::size_t depth = 0;
  for (const auto& column : table) depth = std::max(depth, column.size());

  auto live = [&](int a, std::size_t rank, const Priority& mu) {
    if (rank >= table[static_cast<std::size_t>(a)].size()) return false;
    return phase == SortPhase::Max || mu[a] > 0;
  };

  Priority mu = calculate_priority(target, state.assigned);
  for (std::size_t rank = 0; rank < depth; ++rank) {
    if (state.complete()) return;
    if (phase == SortPhase::Min && (mu.array() == 0).all()) return;

    for (int a = 0; a < k; ++a) {
      if (!live(a, rank, mu)) continue;
      const Candidate& entry = table[static_cast<std::size_t>(a)][rank];
      if (state.recs[entry.agent] >= 0) continue;

      // The same agent may sit in other live columns of this rank row.
      int chosen_action = a;
      const Candidate* chosen = &entry;
      for (int other = a + 1; other < k; ++other) {
        if (!live(other, rank, mu)) continue;
        const Candidate& rival = table[static_cast<std::size_t>(other)][rank];
        if (rival.agent != entry.agent) continue;
        const bool takes_over =
            mu[other] > mu[chosen_action] || (mu[other] == mu[chosen_action] && rival.delta < chosen->delta);
        if (takes_over) {
          chosen_action = other;
          chosen = &rival;
        }
      }

      state.recs[chosen->agent] = chosen->state;
      ++state.assigned[chosen_action];
      mu = calculate_priority(target, state.assigned);
    }
  }
}

RecommendationVector heuristic_recommend(const QTensor& tensor, const NetworkSpec& spec,
                                         const TargetAssignment& target, const LearnerParams& params) {
  const int k = spec.num_actions();
  if (static_cast<int>(tensor.size()) != spec.num_agents) throw InputError("tensor size does not match N");
  if (tensor.front().cols() != k) throw InputError("q-table width does not match the network's k");
  if (target.size() != k) throw InputError("target arity does not match k");

  const ArgmaxTable argmaxes = argmax_table(tensor);
  const RewardEstimate estimate = estimate_reward(possible_actions(argmaxes), spec);
  const Eigen::MatrixXd delta = estimate_update(tensor, argmaxes, estimate.reward, params);

  SelectionState state(spec.num_agents, k);
  select_recommendations(sort_table(argmaxes, delta, k, SortPhase::Min), target, SortPhase::Min, state);
  if (!state.complete()) {
    select_recommendations(sort_table(argmaxes, delta, k, SortPhase::Max), target, SortPhase::Max, state);
  }
  return state.recs;
}

// ---------------------------------------------------------------------------

namespace {

struct ThreeStateView {
  ArgmaxTable argmaxes;
  Eigen::MatrixXd delta;
};

ThreeStateView three_state_view(const QTensor& tensor, const LearnerParams& params) {
  if (tensor.empty() || tensor.front().rows() != 3 || tensor.front().cols() != 3) {
    throw InputError("three-state recommenders need m = k = 3");
  }
  const NetworkSpec spec = make_network(Network::Augmented, static_cast<int>(tensor.size()));
  ThreeStateView view{argmax_table(tensor), {}};
  const RewardEstimate estimate = estimate_reward(possible_actions(view.argmaxes), spec);
  view.delta = estimate_update(tensor, view.argmaxes, estimate.reward, params);
  return view;
}

/// Extreme-delta state among those whose argmax is `action` (lowest index on ties).
int pick_state(const ThreeStateView& view, Eigen::Index agent, int action, bool maximize) {
  int best = -1;
  for (Eigen::Index s = 0; s < view.argmaxes.cols(); ++s) {
    if (view.argmaxes(agent, s) != action) continue;
    const double d = view.delta(agent, s);
    if (best < 0 || (maximize ? d > view.delta(agent, best) : d < view.delta(agent, best))) {
      best = static_cast<int>(s);
    }
  }
  return best;
}

}  // namespace

RecommendationVector route_heuristic_3state(const QTensor& tensor, const LearnerParams& params) {
  const ThreeStateView view = three_state_view(tensor, params);
  const Eigen::Index n = view.argmaxes.rows();
  RecommendationVector recs(n);
  std::vector<Eigen::Index> both;

  for (Eigen::Index i = 0; i < n; ++i) {
    ActionSet reach;
    for (Eigen::Index s = 0; s < 3; ++s) reach.insert(view.argmaxes(i, s));
    if (reach.contains(kUp) && reach.contains(kDown)) {
      both.push_back(i);
    } else if (reach.contains(kUp)) {
      recs[i] = pick_state(view, i, kUp, true);
    } else if (reach.contains(kDown)) {
      recs[i] = pick_state(view, i, kDown, true);
    } else {
      recs[i] = pick_state(view, i, kCross, false);
    }
  }

  const std::size_t to_up = (both.size() + 1) / 2;
  for (std::size_t j = 0; j < both.size(); ++j) {
    recs[both[j]] = pick_state(view, both[j], j < to_up ? kUp : kDown, true);
  }
  return recs;
}

RecommendationVector aligned_heuristic_3state(const QTensor& tensor, const LearnerParams& params) {
  const ThreeStateView view = three_state_view(tensor, params);
  const Eigen::Index n = view.argmaxes.rows();
  RecommendationVector recs(n);
  std::vector<Eigen::Index> both;
  std::vector<Eigen::Index> misaligned;

  for (Eigen::Index i = 0; i < n; ++i) {
    ActionSet aligned_states;
    for (int s = 0; s < 3; ++s)
      if (view.argmaxes(i, s) == s) aligned_states.insert(s);

    if (aligned_states.empty()) {
      misaligned.push_back(i);
    } else if (aligned_states.contains(kUp) && aligned_states.contains(kDown)) {
      both.push_back(i);
    } else {
      // single group, or {up|down} together with cross: the route state wins
      recs[i] = aligned_states.front();
    }
  }

  const std::size_t to_up = (both.size() + 1) / 2;
  for (std::size_t j = 0; j < both.size(); ++j) recs[both[j]] = j < to_up ? kUp : kDown;

  if (!misaligned.empty()) {
    int best_state = 0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 3; ++s) {
      double total = 0.0;
      for (Eigen::Index i : misaligned) total += view.delta(i, s);
      const double mean = total / static_cast<double>(misaligned.size());
      if (mean > best_mean) {
        best_mean = mean;
        best_state = s;
      }
    }
    for (Eigen::Index i : misaligned) recs[i] = best_state;
  }
  return recs;
}

// ---------------------------------------------------------------------------

namespace {

class ConstantStrategy final : public Recommender {
 public:
  explicit ConstantStrategy(const RecommenderContext& ctx)
      : recs_(constant_recommender(ctx.spec.num_agents, ctx.num_states)) {}
  RecommendationVector recommend(const QTensor&, long, Rng&) override { return recs_; }
  std::string_view name() const override { return "none"; }

 private:
  RecommendationVector recs_;
};

class RandomStrategy final : public Recommender {
 public:
  explicit RandomStrategy(const RecommenderContext& ctx) : n_(ctx.spec.num_agents), m_(ctx.num_states) {}
  RecommendationVector recommend(const QTensor&, long, Rng& rng) override { return random_recommender(n_, m_, rng); }
  std::string_view name() const override { return "random"; }

 private:
  int n_;
  int m_;
};

class HeuristicStrategy final : public Recommender {
 public:
  explicit HeuristicStrategy(const RecommenderContext& ctx) : ctx_(ctx) {}
  RecommendationVector recommend(const QTensor& view, long, Rng&) override {
    return heuristic_recommend(view, ctx_.spec, ctx_.target, ctx_.params);
  }
  std::string_view name() const override { return "heuristic"; }

 private:
  RecommenderContext ctx_;
};

class Route3Strategy final : public Recommender {
 public:
  explicit Route3Strategy(const RecommenderContext& ctx) : params_(ctx.params) {}
  RecommendationVector recommend(const QTensor& view, long, Rng&) override {
    return route_heuristic_3state(view, params_);
  }
  std::string_view name() const override { return "route3"; }

 private:
  LearnerParams params_;
};

class Aligned3Strategy final : public Recommender {
 public:
  explicit Aligned3Strategy(const RecommenderContext& ctx) : params_(ctx.params) {}
  RecommendationVector recommend(const QTensor& view, long, Rng&) override {
    return aligned_heuristic_3state(view, params_);
  }
  std::string_view name() const override { return "aligned3"; }

 private:
  LearnerParams params_;
};

class TwoStepStrategy final : public Recommender {
 public:
  TwoStepStrategy(const RecommenderContext& ctx, TwoStepKind kind) : n_(ctx.spec.num_agents), kind_(kind) {}
  RecommendationVector recommend(const QTensor&, long t, Rng&) override { return two_step_recommender(kind_, t, n_); }
  std::string_view name() const override {
    return kind_ == TwoStepKind::Aligned ? "twostep-aligned" : "twostep-misaligned";
  }

 private:
  int n_;
  TwoStepKind kind_;
};

}  // namespace

const std::vector<std::string>& recommender_names() {
  static const std::vector<std::string> names{"none",     "random",          "heuristic",         "route3",
                                              "aligned3", "twostep-aligned", "twostep-misaligned"};
  return names;
}

void validate_recommender(std::string_view name, const RecommenderContext& ctx) {
  const int k = ctx.spec.num_actions();
  if (ctx.num_states < 1) throw InputError("recommendation space needs m >= 1");
  if (name == "none" || name == "random") return;
  if (name == "heuristic") {
    if (ctx.target.size() != k) throw InputError("heuristic target arity does not match k");
    return;
  }
  if (name == "route3" || name == "aligned3") {
    if (ctx.spec.variant != Network::Augmented || ctx.num_states != 3) {
      throw InputError(std::string(name) + " needs the augmented network with m = 3");
    }
    return;
  }
  if (name == "twostep-aligned" || name == "twostep-misaligned") {
    if (ctx.spec.variant != Network::Initial || ctx.num_states != 2) {
      throw InputError(std::string(name) + " needs the initial network with m = 2");
    }
    return;
  }
  throw InputError("unknown recommender '" + std::string(name) + "'");
}

std::unique_ptr<Recommender> make_recommender(std::string_view name, const RecommenderContext& ctx) {
  validate_recommender(name, ctx);
  if (name == "none") return std::make_unique<ConstantStrategy>(ctx);
  if (name == "random") return std::make_unique<RandomStrategy>(ctx);
  if (name == "heuristic") return std::make_unique<HeuristicStrategy>(ctx);
  if (name == "route3") return std::make_unique<Route3Strategy>(ctx);
  if (name == "aligned3") return std::make_unique<Aligned3Strategy>(ctx);
  if (name == "twostep-aligned") return std::make_unique<TwoStepStrategy>(ctx, TwoStepKind::Aligned);
  return std::make_unique<TwoStepStrategy>(ctx, TwoStepKind::Misaligned);
}

}  // namespace ldmp
