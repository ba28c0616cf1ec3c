#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ldmp/action_set.hpp"
#include "ldmp/braess.hpp"
#include "ldmp/metrics.hpp"
#include "ldmp/qlearner.hpp"

namespace ldmp {

/// n x m table of row argmaxes: A(i, s) is what agent i plays greedily in state s.
using ArgmaxTable = Eigen::MatrixXi;
/// Per-agent set of actions some recommendation can induce.
using PossibleActions = std::vector<ActionSet>;
/// mu_a: how many more agents action a still needs. 0 = satisfied.
using Priority = Eigen::VectorXi;

ArgmaxTable argmax_table(const QTensor& tensor);
PossibleActions possible_actions(const ArgmaxTable& argmaxes);
PossibleActions get_possible_actions(const QTensor& tensor);

// ---------------------------------------------------------------------------
// Baselines

/// Entry i = i mod min(m, 2): the (u, d, u, d, ...) pattern, or all zeros if m = 1.
RecommendationVector constant_recommender(int n, int m);

RecommendationVector random_recommender(int n, int m, Rng& rng);

enum class TwoStepKind { Aligned, Misaligned };

/// Initial network, m = k = 2. Step 0 sends everyone to one state (down for
/// Aligned, up for Misaligned); every later step uses the constant split.
RecommendationVector two_step_recommender(TwoStepKind kind, long t, int n);

// ---------------------------------------------------------------------------
// Heuristic route recommender and its subroutines

struct RewardEstimate {
  ActionCounts assignment;  // d': best feasible counts given locked agents
  Eigen::VectorXd reward;   // r_bar_a = -l_a(d')
};

/// Agents with a single possible action are locked to it; the rest are
/// placed (each within its own possible set) to minimise mean latency.
/// Ties prefer more agents on up, then on down.
RewardEstimate estimate_reward(const PossibleActions& possible, const NetworkSpec& spec);

/// Delta for the realizable triple (i, s, A(i, s)) only; entry (i, s) of
/// the returned n x m matrix is
///   alpha * (r_bar_a + gamma * max_a' Q_i[s, a'] - Q_i[s, a]),  a = A(i, s).
/// The next-state row is taken to be s itself.
Eigen::MatrixXd estimate_update(const QTensor& tensor, const ArgmaxTable& argmaxes,
                                const Eigen::VectorXd& reward_estimate, const LearnerParams& params);

/// mu_a = max(0, d*_a - assigned_a).
Priority calculate_priority(const TargetAssignment& target, const ActionCounts& assigned);

enum class SortPhase { Min, Max };

struct Candidate {
  int agent = 0;
  int state = 0;
  double delta = 0.0;
};

/// One column per action holding every (i, s) with A(i, s) = a, ordered by
/// delta (ascending for Min, descending for Max), then agent, then state.
using SortedTable = std::vector<std::vector<Candidate>>;

SortedTable sort_table(const ArgmaxTable& argmaxes, const Eigen::MatrixXd& delta, int k, SortPhase phase);

/// Partial assignment built up across selection passes. recs(i) = -1 until assigned.
struct SelectionState {
  RecommendationVector recs;
  ActionCounts assigned;

  SelectionState(int n, int k) : recs(RecommendationVector::Constant(n, -1)), assigned(ActionCounts::Zero(k)) {}
  bool complete() const { return (recs.array() >= 0).all(); }
};

/// Rank-row scan over the sorted columns (visited up, down, cross within a
/// row). Min phase skips columns whose priority is 0; Max phase does not.
/// An agent present in several live columns of the current row goes to the
/// highest-priority action, ties broken by the smaller delta. Priorities are
/// recomputed after every single assignment.
void select_recommendations(const SortedTable& table, const TargetAssignment& target, SortPhase phase,
                            SelectionState& state);

/// Full heuristic: argmaxes -> possible actions -> reward estimate ->
/// update estimates -> min-sorted selection under priorities -> max-sorted
/// selection for whoever is left.
RecommendationVector heuristic_recommend(const QTensor& tensor, const NetworkSpec& spec,
                                         const TargetAssignment& target, const LearnerParams& params);

// ---------------------------------------------------------------------------
// Three-state (m = k = 3) route recommenders

/// Groups agents by their reachable actions. up/down agents get the state
/// maximising their predicted update on that action; agents who can only
/// cross get the state minimising it; agents who can do both up and down
/// are split evenly (extra agent to up).
RecommendationVector route_heuristic_3state(const QTensor& tensor, const LearnerParams& params);

/// Groups agents by aligned states (A(i, s) = s). Single-group agents get
/// their aligned state, up-and-down agents are split evenly between their
/// aligned up/down states, and agents with no aligned state all receive
/// the state with the largest mean predicted update over that group.
RecommendationVector aligned_heuristic_3state(const QTensor& tensor, const LearnerParams& params);

// ---------------------------------------------------------------------------
// Strategy objects selected by name from the harness

struct RecommenderContext {
  NetworkSpec spec;
  int num_states = 1;
  TargetAssignment target;
  LearnerParams params;
};

class Recommender {
 public:
  virtual ~Recommender() = default;
  /// `view` is the (possibly noise-perturbed) tensor the recommender sees.
  virtual RecommendationVector recommend(const QTensor& view, long t, Rng& rng) = 0;
  virtual std::string_view name() const = 0;
};

/// none | random | heuristic | route3 | aligned3 | twostep-aligned | twostep-misaligned
std::unique_ptr<Recommender> make_recommender(std::string_view name, const RecommenderContext& ctx);

/// Throws InputError when the strategy cannot run with the context's (network, m).
void validate_recommender(std::string_view name, const RecommenderContext& ctx);

const std::vector<std::string>& recommender_names();

}  // namespace ldmp
