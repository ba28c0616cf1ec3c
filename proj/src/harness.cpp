#include "ldmp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace ldmp {

EpsilonSchedule ExperimentConfig::epsilon_schedule() const {
  if (epsilon_decay_to) return EpsilonSchedule::linear(epsilon, *epsilon_decay_to, steps);
  return EpsilonSchedule::constant(epsilon);
}

RecommenderContext ExperimentConfig::recommender_context() const {
  const NetworkSpec spec = network_spec();
  return {spec, states, social_optimum(spec), params};
}

void ExperimentConfig::validate() const {
  if (agents < 1) throw InputError("agents must be >= 1");
  if (states < 1) throw InputError("states must be >= 1");
  if (steps < 1) throw InputError("steps must be >= 1");
  if (reps < 1) throw InputError("reps must be >= 1");
  if (!(noise_std >= 0.0)) throw InputError("noise-std must be >= 0");
  if (threads < 0) throw InputError("threads must be >= 0");
  params.validate();
  epsilon_schedule().validate();
  validate_recommender(recommender, recommender_context());
  const bool matrix_init =
      init.kind == InitScheme::Kind::AlignedMatrix || init.kind == InitScheme::Kind::MisalignedMatrix;
  if (matrix_init && (states != 3 || num_actions() != 3)) {
    throw InputError("aligned/misaligned init requires m = k = 3");
  }
}

std::string run_id(const ExperimentConfig& config) {
  return fmt::format("{}_{}_n{}_m{}", config.recommender, to_string(config.network), config.agents, config.states);
}

QTensor perturb_observation(const QTensor& tensor, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw InputError("observation noise std must be >= 0");
  QTensor view = tensor;
  if (sigma == 0.0) return view;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& table : view)
    for (Eigen::Index s = 0; s < table.rows(); ++s)
      for (Eigen::Index a = 0; a < table.cols(); ++a) table(s, a) += noise(rng);
  return view;
}

// ---------------------------------------------------------------------------

namespace {

QTensor initial_tensor(const ExperimentConfig& config, int rep) {
  Rng init_rng = make_stream(config.seed, StreamRole::Init, static_cast<std::uint64_t>(rep));
  return init_qtensor(config.agents, config.states, config.num_actions(), config.init, init_rng);
}

}  // namespace

Simulation::Simulation(const ExperimentConfig& config, int rep)
    : Simulation(config, rep, initial_tensor(config, rep),
                 make_recommender(config.recommender, config.recommender_context())) {}

Simulation::Simulation(const ExperimentConfig& config, int rep, QTensor initial,
                       std::unique_ptr<Recommender> strategy)
    : config_(config),
      spec_(config.network_spec()),
      schedule_(config.epsilon_schedule()),
      tables_(std::move(initial)),
      strategy_(std::move(strategy)),
      recommender_rng_(make_stream(config.seed, StreamRole::Recommender, static_cast<std::uint64_t>(rep))) {
  config_.params.validate();
  schedule_.validate();
  if (static_cast<int>(tables_.size()) != spec_.num_agents) throw InputError("initial tensor size does not match N");
  for (const auto& table : tables_) {
    if (table.cols() != spec_.num_actions()) throw InputError("q-table width does not match the network");
    if (table.rows() != tables_.front().rows()) throw InputError("q-tables must share dimensions");
  }
  if (!strategy_) throw InputError("simulation needs a recommender");

  target_distribution_ = social_optimum(spec_).cast<double>() / static_cast<double>(spec_.num_agents);
  agent_rngs_.reserve(tables_.size());
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    agent_rngs_.push_back(make_stream(config.seed, StreamRole::Agent, static_cast<std::uint64_t>(rep), i));
  }
  actions_ = ActionProfile::Zero(spec_.num_agents);
}

RunRecord Simulation::step() {
  const double eps = epsilon_at(schedule_, t_);
  const int m = static_cast<int>(tables_.front().rows());

  if (config_.noise_std > 0.0) {
    recs_ = strategy_->recommend(perturb_observation(tables_, config_.noise_std, recommender_rng_), t_,
                                 recommender_rng_);
  } else {
    recs_ = strategy_->recommend(tables_, t_, recommender_rng_);
  }
  if (recs_.size() != spec_.num_agents || (recs_.array() < 0).any() || (recs_.array() >= m).any()) {
    throw InputError(fmt::format("recommender '{}' produced an invalid vector at step {}", strategy_->name(), t_));
  }

  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    actions_[idx] = select_action(tables_[i], recs_[idx], eps, agent_rngs_[i]);
  }

  const ActionCounts counts = count_actions(spec_, actions_);
  const Eigen::VectorXd lat = latencies(spec_, counts);

  RunRecord record;
  record.step = t_;
  record.epsilon = eps;
  record.counts = counts;
  record.welfare_raw = -counts.cast<double>().dot(lat) / spec_.num_agents;
  record.welfare_rescaled = rescale_welfare(record.welfare_raw);
  record.kl = kl_to_target(counts.cast<double>() / spec_.num_agents, target_distribution_);
  if (m == spec_.num_actions()) record.alignment = alignment(recs_, tables_);

  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const int s = recs_[idx];
    bellman_update(tables_[i], s, actions_[idx], -lat[actions_[idx]], s, config_.params);
  }
  ++t_;
  return record;
}

std::vector<RunRecord> run_episode(const ExperimentConfig& config, int rep) {
  config.validate();
  Simulation sim(config, rep);
  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(config.steps));
  for (long t = 0; t < config.steps; ++t) records.push_back(sim.step());
  return records;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int workers = threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::vector<RunRecord>> run_repetitions(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::vector<RunRecord>> reps(static_cast<std::size_t>(config.reps));
  parallel_for(config.reps, config.threads,
               [&](int rep) { reps[static_cast<std::size_t>(rep)] = run_episode(config, rep); });
  for (const auto& records : reps) {
    if (records.size() != static_cast<std::size_t>(config.steps)) {
      throw std::runtime_error(fmt::format("{}: repetition produced {} of {} records", run_id(config),
                                           records.size(), config.steps));
    }
  }
  return reps;
}

// ---------------------------------------------------------------------------

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Two-pass sample mean / population std over values in index order.
MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  double total = 0.0;
  for (double v : values) total += v;
  const double mean = total / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace

void SweepSpec::validate() const {
  if (agents.empty() || states.empty() || recommenders.empty()) throw InputError("sweep lists must be non-empty");
}

CellSummary summarize_cell(const ExperimentConfig& config, const std::vector<std::vector<RunRecord>>& reps) {
  std::vector<double> full;
  std::vector<double> tail;
  const auto steps = static_cast<std::size_t>(config.steps);
  const std::size_t tail_begin = steps - std::max<std::size_t>(1, steps / 10);
  for (const auto& records : reps) {
    full.push_back(mean_rescaled_welfare(records, 0, records.size()));
    tail.push_back(mean_rescaled_welfare(records, tail_begin, records.size()));
  }
  const MeanStd f = mean_std(full);
  const MeanStd l = mean_std(tail);
  return {config.recommender, config.agents, config.states, static_cast<int>(reps.size()), f.mean, f.std, l.mean, l.std};
}

const char* const kSweepCsvHeader = "recommender,agents,states,reps,mean_welfare,std_welfare,mean_tail10,std_tail10";

std::string format_cell_row(const CellSummary& c) {
  return fmt::format("{},{},{},{},{},{},{},{}", c.recommender, c.agents, c.states, c.reps, c.mean_welfare,
                     c.std_welfare, c.mean_tail, c.std_tail);
}

std::vector<CellSummary> run_sweep(const SweepSpec& sweep, const ExperimentConfig& base, bool write_files) {
  sweep.validate();
  std::vector<ExperimentConfig> cells;
  for (const auto& name : sweep.recommenders)
    for (int n : sweep.agents)
      for (int m : sweep.states) {
        ExperimentConfig cell = base;
        cell.recommender = name;
        cell.agents = n;
        cell.states = m;
        try {
          cell.validate();
        } catch (const std::exception& e) {
          throw InputError(fmt::format("sweep cell {}: {}", run_id(cell), e.what()));
        }
        cells.push_back(cell);
      }

  std::vector<CellSummary> summaries;
  for (const auto& cell : cells) {
    try {
      const auto reps = run_repetitions(cell);
      if (write_files && !cell.out_dir.empty()) write_trajectories(cell.out_dir, cell, reps);
      summaries.push_back(summarize_cell(cell, reps));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("sweep cell {} failed: {}", run_id(cell), e.what()));
    }
  }
  return summaries;
}

// ---------------------------------------------------------------------------

ExperimentConfig fig2_config() {
  ExperimentConfig config;
  config.network = Network::Augmented;
  config.agents = 100;
  config.states = 1;
  config.recommender = "none";
  config.params = {0.1, 0.8};
  config.epsilon = 0.01;
  config.epsilon_decay_to.reset();
  config.init = InitScheme::uniform();
  config.steps = 10000;
  config.reps = 1;
  return config;
}

CurveSummary summarize_curves(const ExperimentConfig& config, const std::vector<std::vector<RunRecord>>& reps) {
  CurveSummary out;
  out.recommender = config.recommender;
  out.init = std::string(to_string(config.init.kind));
  out.epsilon = config.epsilon;
  const auto steps = static_cast<std::size_t>(config.steps);

  std::vector<double> run_latency;
  std::vector<double> run_alignment;
  for (const auto& records : reps) {
    double lat = 0.0;
    double align = 0.0;
    for (const auto& r : records) {
      lat += -r.welfare_raw;
      align += r.alignment.value_or(0.0);
    }
    run_latency.push_back(lat / static_cast<double>(records.size()));
    run_alignment.push_back(align / static_cast<double>(records.size()));
  }
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> lat;
    std::vector<double> align;
    for (const auto& records : reps) {
      lat.push_back(-records[t].welfare_raw);
      align.push_back(records[t].alignment.value_or(0.0));
    }
    const MeanStd l = mean_std(lat);
    out.latency_mean.push_back(l.mean);
    out.latency_std.push_back(l.std);
    out.alignment_mean.push_back(mean_std(align).mean);
  }
  const MeanStd l = mean_std(run_latency);
  const MeanStd a = mean_std(run_alignment);
  out.run_latency_mean = l.mean;
  out.run_latency_std = l.std;
  out.run_alignment_mean = a.mean;
  out.run_alignment_std = a.std;
  return out;
}

ExperimentConfig two_route_config(const std::string& recommender, double epsilon) {
  ExperimentConfig config;
  config.network = Network::Initial;
  config.agents = 100;
  config.states = 2;
  config.recommender = recommender;
  config.params = {0.01, 0.0};
  config.epsilon = epsilon;
  config.epsilon_decay_to.reset();
  config.init = InitScheme::two_route();
  config.steps = 500;
  config.reps = 10;
  return config;
}

namespace {

void apply_options(ExperimentConfig& config, const ReplicationOptions& options) {
  if (options.reps) config.reps = *options.reps;
  if (options.steps) config.steps = *options.steps;
  config.seed = options.seed;
  config.threads = options.threads;
}

}  // namespace

std::vector<CurveSummary> replicate_two_route(const std::vector<double>& epsilons, const ReplicationOptions& options) {
  std::vector<CurveSummary> out;
  for (const char* name : {"none", "random", "twostep-aligned", "twostep-misaligned"}) {
    for (double eps : epsilons) {
      ExperimentConfig config = two_route_config(name, eps);
      apply_options(config, options);
      out.push_back(summarize_curves(config, run_repetitions(config)));
    }
  }
  return out;
}

ExperimentConfig app_f_config(const std::string& recommender, const InitScheme& init, double epsilon) {
  ExperimentConfig config;
  config.network = Network::Augmented;
  config.agents = 100;
  config.states = 3;
  config.recommender = recommender;
  config.params = {0.01, 0.0};
  config.epsilon = epsilon;
  config.epsilon_decay_to.reset();
  config.init = init;
  config.steps = 10000;
  config.reps = 40;
  return config;
}

std::vector<CurveSummary> replicate_app_f(const std::vector<InitScheme>& inits, const std::vector<double>& epsilons,
                                          const ReplicationOptions& options) {
  std::vector<CurveSummary> out;
  for (const char* name : {"none", "random", "route3", "aligned3"})
    for (const auto& init : inits)
      for (double eps : epsilons) {
        ExperimentConfig config = app_f_config(name, init, eps);
        apply_options(config, options);
        out.push_back(summarize_curves(config, run_repetitions(config)));
      }
  return out;
}

const char* const kCurveSummaryCsvHeader =
    "recommender,init,epsilon,mean_latency,std_latency,mean_alignment,std_alignment";

std::string format_curve_summary_row(const CurveSummary& s) {
  return fmt::format("{},{},{},{},{},{},{}", s.recommender, s.init, s.epsilon, s.run_latency_mean, s.run_latency_std,
                     s.run_alignment_mean, s.run_alignment_std);
}

// ---------------------------------------------------------------------------

std::string trajectories_csv(const ExperimentConfig& config, const std::vector<std::vector<RunRecord>>& reps) {
  const std::string id = run_id(config);
  std::string out = std::string(kRunCsvHeader) + "\n";
  for (std::size_t rep = 0; rep < reps.size(); ++rep)
    for (const auto& record : reps[rep]) out += format_run_row(id, static_cast<int>(rep), record) + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << text;
  if (!file) throw std::runtime_error("failed writing " + path.string());
}

void write_trajectories(const std::filesystem::path& dir, const ExperimentConfig& config,
                        const std::vector<std::vector<RunRecord>>& reps) {
  const std::string id = run_id(config);
  for (std::size_t rep = 0; rep < reps.size(); ++rep) {
    std::string text = std::string(kRunCsvHeader) + "\n";
    for (const auto& record : reps[rep]) text += format_run_row(id, static_cast<int>(rep), record) + "\n";
    write_text(dir / fmt::format("{}_rep{}.csv", id, rep), text);
  }
}

}  // namespace ldmp
