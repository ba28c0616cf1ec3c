#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldmp/braess.hpp"
#include "ldmp/metrics.hpp"
#include "ldmp/qlearner.hpp"
#include "ldmp/recommender.hpp"

namespace ldmp {

struct ExperimentConfig {
  Network network = Network::Augmented;
  int agents = 100;
  int states = 3;
  std::string recommender = "heuristic";
  LearnerParams params{0.1, 0.0};
  double epsilon = 0.1;
  /// End value of a linear decay over the horizon; empty means constant epsilon.
  std::optional<double> epsilon_decay_to = 0.0;
  InitScheme init = InitScheme::uniform();
  long steps = 10000;
  int reps = 40;
  std::uint64_t seed = 1;
  double noise_std = 0.0;
  std::string out_dir;
  /// Worker threads for repetitions; 0 = hardware concurrency. Never affects results.
  int threads = 1;

  int num_actions() const { return network == Network::Initial ? 2 : 3; }
  NetworkSpec network_spec() const { return make_network(network, agents); }
  EpsilonSchedule epsilon_schedule() const;
  RecommenderContext recommender_context() const;
  /// Throws InputError on any incompatible setting, before a run starts.
  void validate() const;
};

/// Deterministic cell label, e.g. "heuristic_augmented_n100_m93".
std::string run_id(const ExperimentConfig& config);

/// Copy of the tensor with i.i.d. N(0, sigma) noise on every entry.
/// sigma = 0 returns an exact copy without touching the rng.
QTensor perturb_observation(const QTensor& tensor, double sigma, Rng& rng);

/// One repetition's synchronous loop: recommend, act, reward, update, record.
///
/// Streams: one per agent, one for the recommender (strategy draws and
/// observation noise), one for initialisation; all derived from
/// (seed, role, rep, agent). The agent update uses the current state as
/// its next state.
class Simulation {
 public:
  Simulation(const ExperimentConfig& config, int rep);
  /// Custom start: explicit tables and strategy, same stream layout.
  Simulation(const ExperimentConfig& config, int rep, QTensor initial, std::unique_ptr<Recommender> strategy);

  /// Advances one step and returns its record.
  RunRecord step();
  long time() const { return t_; }
  const QTensor& tables() const { return tables_; }
  const ActionProfile& last_actions() const { return actions_; }
  const RecommendationVector& last_recommendations() const { return recs_; }

 private:
  ExperimentConfig config_;
  NetworkSpec spec_;
  EpsilonSchedule schedule_;
  ActionDistribution target_distribution_;
  QTensor tables_;
  std::unique_ptr<Recommender> strategy_;
  std::vector<Rng> agent_rngs_;
  Rng recommender_rng_;
  ActionProfile actions_;
  RecommendationVector recs_;
  long t_ = 0;
};

/// Runs config.steps steps of repetition `rep`.
std::vector<RunRecord> run_episode(const ExperimentConfig& config, int rep);

/// Calls fn(0..count-1) on up to `threads` workers. Each index is handled
/// exactly once; the first exception is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// All repetitions of one cell, indexed by rep.
std::vector<std::vector<RunRecord>> run_repetitions(const ExperimentConfig& config);

struct SweepSpec {
  std::vector<int> agents{100, 300, 500, 700, 900};
  std::vector<int> states{3, 13, 23, 33, 43, 53, 63, 73, 83, 93};
  std::vector<std::string> recommenders{"heuristic", "none", "random"};
  void validate() const;
};

struct CellSummary {
  std::string recommender;
  int agents = 0;
  int states = 0;
  int reps = 0;
  double mean_welfare = 0.0;  // full-horizon mean rescaled welfare, averaged over reps
  double std_welfare = 0.0;   // across reps
  double mean_tail = 0.0;     // last 10% of steps
  double std_tail = 0.0;
};

/// Full-horizon and last-10% welfare statistics over repetitions.
CellSummary summarize_cell(const ExperimentConfig& config, const std::vector<std::vector<RunRecord>>& reps);

/// Cross product recommender x agents x states. Writes per-rep trajectory
/// CSVs (when config.out_dir is set and write_trajectories) and returns
/// the heatmap rows in sweep order.
std::vector<CellSummary> run_sweep(const SweepSpec& sweep, const ExperimentConfig& base, bool write_trajectories = true);

extern const char* const kSweepCsvHeader;
std::string format_cell_row(const CellSummary& cell);

// ---------------------------------------------------------------------------
// Replication drivers

/// Scale and seeding knobs shared by the replication drivers.
struct ReplicationOptions {
  std::optional<int> reps;
  std::optional<long> steps;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// 100 stateless learners (m = 1, no recommendations), alpha 0.1, gamma 0.8.
ExperimentConfig fig2_config();

struct CurveSummary {
  std::string recommender;
  std::string init;
  double epsilon = 0.0;
  std::vector<double> latency_mean;    // per step, across reps
  std::vector<double> latency_std;
  std::vector<double> alignment_mean;  // per step, across reps
  double run_latency_mean = 0.0;       // over steps then reps
  double run_latency_std = 0.0;        // across reps
  double run_alignment_mean = 0.0;
  double run_alignment_std = 0.0;
};

/// Aggregates per-step latency (= -welfare_raw) and alignment across reps.
CurveSummary summarize_curves(const ExperimentConfig& config, const std::vector<std::vector<RunRecord>>& reps);

/// Initial network, n = 100, alpha 0.01, gamma 0, T = 500, R = 10, Q = -1.5.
ExperimentConfig two_route_config(const std::string& recommender, double epsilon);

/// none | random | twostep-aligned | twostep-misaligned over the epsilon grid.
std::vector<CurveSummary> replicate_two_route(const std::vector<double>& epsilons, const ReplicationOptions& options);

/// Augmented network, n = 100, m = k = 3, alpha 0.01, gamma 0, T = 10000, R = 40.
ExperimentConfig app_f_config(const std::string& recommender, const InitScheme& init, double epsilon);

/// none | random | route3 | aligned3 x the given inits x epsilon grid.
std::vector<CurveSummary> replicate_app_f(const std::vector<InitScheme>& inits, const std::vector<double>& epsilons,
                                          const ReplicationOptions& options);

extern const char* const kCurveSummaryCsvHeader;
std::string format_curve_summary_row(const CurveSummary& summary);

// ---------------------------------------------------------------------------
// Files

/// Writes every repetition to <dir>/<run_id>_rep<r>.csv.
void write_trajectories(const std::filesystem::path& dir, const ExperimentConfig& config,
                        const std::vector<std::vector<RunRecord>>& reps);

std::string trajectories_csv(const ExperimentConfig& config, const std::vector<std::vector<RunRecord>>& reps);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ldmp
