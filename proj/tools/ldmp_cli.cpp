// Command-line front end: run, sweep, fig2, two-route, app-f, verify-theory.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldmp/config.hpp"
#include "ldmp/harness.hpp"
#include "ldmp/theory.hpp"

namespace fs = std::filesystem;
using namespace ldmp;

namespace {

/// Flags shared by `run` and `sweep`; values are strings so that unset
/// flags leave the config file's value alone.
struct ConfigFlags {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> set;
  std::string network, agents, states, recommender, alpha, gamma, epsilon, epsilon_decay, init, steps, reps, seed,
      noise_std, out, threads;

  void attach(CLI::App* app, bool with_cell_flags) {
    app->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--network", network, "initial | augmented");
    if (with_cell_flags) {
      app->add_option("--agents", agents, "number of Q-learners n");
      app->add_option("--states", states, "recommendation space size m");
      app->add_option("--recommender", recommender,
                      "none | random | heuristic | route3 | aligned3 | twostep-aligned | twostep-misaligned");
    }
    app->add_option("--alpha", alpha, "learning rate");
    app->add_option("--gamma", gamma, "discount factor");
    app->add_option("--epsilon", epsilon, "exploration rate (start value when decaying)");
    app->add_option("--epsilon-decay", epsilon_decay, "linear decay end value over the horizon, or 'none'");
    app->add_option("--init", init, "two-route | aligned | misaligned | uniform | nash");
    app->add_option("--steps", steps, "horizon T");
    app->add_option("--reps", reps, "repetitions R");
    app->add_option("--seed", seed, "base seed");
    app->add_option("--noise-std", noise_std, "std of Gaussian noise on the recommender's view");
    app->add_option("--out", out, "output directory");
    app->add_option("--threads", threads, "worker threads for repetitions (0 = all cores)");
  }

  ExperimentConfig resolve(ExperimentConfig config) const {
    if (!config_file.empty()) config = load_config_file(config_file, config);
    const std::pair<const char*, const std::string*> flags[] = {
        {"network", &network}, {"agents", &agents},       {"states", &states},
        {"recommender", &recommender}, {"alpha", &alpha}, {"gamma", &gamma},
        {"epsilon", &epsilon}, {"epsilon-decay", &epsilon_decay}, {"init", &init},
        {"steps", &steps},     {"reps", &reps},           {"seed", &seed},
        {"noise-std", &noise_std}, {"out", &out},         {"threads", &threads}};
    for (const auto& [key, value] : flags)
      if (!value->empty()) apply_setting(config, key, *value);
    return config;
  }
};

fs::path out_dir_or_default(const ExperimentConfig& config, const char* fallback) {
  return config.out_dir.empty() ? fs::path(fallback) : fs::path(config.out_dir);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, double wall,
                    const nlohmann::json& extra = nlohmann::json::object()) {
  write_text(dir / "manifest.json", make_manifest(config, wall, extra).dump(2) + "\n");
}

int cmd_run(const ConfigFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = flags.resolve({});
  config.validate();
  const fs::path dir = out_dir_or_default(config, "out/run");
  config.out_dir = dir.string();

  const auto reps = run_repetitions(config);
  write_trajectories(dir, config, reps);
  const CellSummary cell = summarize_cell(config, reps);
  write_text(dir / "summary.csv", std::string(kSweepCsvHeader) + "\n" + format_cell_row(cell) + "\n");
  write_manifest(dir, config, seconds_since(start), {{"command", "run"}});
  fmt::print("{}: mean welfare {:.4f} (std {:.4f}), last-10% {:.4f} (std {:.4f}) over {} reps -> {}\n",
             run_id(config), cell.mean_welfare, cell.std_welfare, cell.mean_tail, cell.std_tail, cell.reps,
             dir.string());
  return 0;
}

int cmd_sweep(const ConfigFlags& flags, SweepSpec sweep, bool summary_only) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig base = flags.resolve({});
  const fs::path dir = out_dir_or_default(base, "out/sweep");
  base.out_dir = dir.string();

  const auto cells = run_sweep(sweep, base, !summary_only);
  std::string csv = std::string(kSweepCsvHeader) + "\n";
  for (const auto& cell : cells) {
    csv += format_cell_row(cell) + "\n";
    fmt::print("{:>10} n={:<4} m={:<3} welfare {:.4f} +- {:.4f}  tail {:.4f}\n", cell.recommender, cell.agents,
               cell.states, cell.mean_welfare, cell.std_welfare, cell.mean_tail);
  }
  write_text(dir / "heatmap.csv", csv);
  write_manifest(dir, base, seconds_since(start),
                 {{"command", "sweep"},
                  {"sweep", {{"agents", sweep.agents}, {"states", sweep.states}, {"recommenders", sweep.recommenders}}}});
  return 0;
}

int cmd_fig2(const ConfigFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = flags.resolve(fig2_config());
  config.validate();
  const fs::path dir = out_dir_or_default(config, "out/fig2");
  const auto reps = run_repetitions(config);
  write_text(dir / "fig2.csv", trajectories_csv(config, reps));
  if (config.network == Network::Augmented) {
    std::string simplex = std::string(kSimplexCsvHeader) + "\n";
    const auto points = simplex_trajectory(reps.front());
    for (std::size_t t = 0; t < points.size(); ++t) simplex += format_simplex_row(static_cast<long>(t), points[t]) + "\n";
    write_text(dir / "fig2_simplex.csv", simplex);
  }
  write_manifest(dir, config, seconds_since(start), {{"command", "fig2"}});
  const auto& records = reps.front();
  fmt::print("fig2: mean rescaled welfare over last half {:.4f} -> {}\n",
             mean_rescaled_welfare(records, records.size() / 2, records.size()), (dir / "fig2.csv").string());
  return 0;
}

std::string curves_csv(const std::vector<CurveSummary>& curves) {
  std::string out = "recommender,init,epsilon,step,latency_mean,latency_std,alignment_mean\n";
  for (const auto& c : curves)
    for (std::size_t t = 0; t < c.latency_mean.size(); ++t)
      out += fmt::format("{},{},{},{},{},{},{}\n", c.recommender, c.init, c.epsilon, t, c.latency_mean[t],
                         c.latency_std[t], c.alignment_mean[t]);
  return out;
}

std::string summary_csv(const std::vector<CurveSummary>& curves) {
  std::string out = std::string(kCurveSummaryCsvHeader) + "\n";
  for (const auto& c : curves) out += format_curve_summary_row(c) + "\n";
  return out;
}

int cmd_two_route(const ReplicationOptions& options, const std::vector<double>& epsilons, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  const auto curves = replicate_two_route(epsilons, options);
  write_text(dir / "two_route_curves.csv", curves_csv(curves));
  write_text(dir / "two_route_summary.csv", summary_csv(curves));
  ExperimentConfig reference = two_route_config("none", epsilons.front());
  reference.seed = options.seed;
  write_manifest(dir, reference, seconds_since(start), {{"command", "two-route"}, {"epsilons", epsilons}});
  for (const auto& c : curves)
    fmt::print("{:>18} eps={:<5} latency {:.4f} alignment {:.4f}\n", c.recommender, c.epsilon, c.run_latency_mean,
               c.run_alignment_mean);
  return 0;
}

int cmd_app_f(const ReplicationOptions& options, const std::vector<std::string>& init_names,
              const std::vector<double>& epsilons, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<InitScheme> inits;
  for (const auto& name : init_names) inits.push_back(parse_init(name));
  const auto curves = replicate_app_f(inits, epsilons, options);
  write_text(dir / "app_f_summary.csv", summary_csv(curves));
  ExperimentConfig reference = app_f_config("none", inits.front(), epsilons.front());
  reference.seed = options.seed;
  write_manifest(dir, reference, seconds_since(start),
                 {{"command", "app-f"}, {"epsilons", epsilons}, {"inits", init_names}});
  for (const auto& c : curves)
    fmt::print("{:>9} {:>10} eps={:<5} latency {:.4f} +- {:.4f} alignment {:.4f} +- {:.4f}\n", c.recommender, c.init,
               c.epsilon, c.run_latency_mean, c.run_latency_std, c.run_alignment_mean, c.run_alignment_std);
  return 0;
}

int cmd_verify_theory(const TheoryOptions& options, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  const TheoryReport report = verify_theory(options);
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    fmt::print("[{}] {} ({})\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  write_text(dir / "coverage.csv", coverage_csv(report.coverage));
  nlohmann::json manifest = {{"command", "verify-theory"},
                             {"trials", options.trials},
                             {"m_max", options.m_max},
                             {"k", options.k},
                             {"resolved_seed", options.seed},
                             {"version", std::string(version_string())},
                             {"wall_time", seconds_since(start)},
                             {"checks", checks}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return report.all_passed() ? 0 : 3;
}

void print_error(const char* kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", message}, {"kind", kind}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recommender steering of Q-learners in the Braess congestion game"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "simulate one (recommender, n, m) cell");
  run_flags.attach(run, true);

  ConfigFlags sweep_flags;
  SweepSpec sweep;
  bool summary_only = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "welfare heatmap over recommender x n x m");
  sweep_flags.attach(sweep_cmd, false);
  sweep_cmd->add_option("--agents-list", sweep.agents, "n values")->delimiter(',');
  sweep_cmd->add_option("--states-list", sweep.states, "m values")->delimiter(',');
  sweep_cmd->add_option("--recommenders", sweep.recommenders, "recommender names")->delimiter(',');
  sweep_cmd->add_flag("--summary-only", summary_only, "skip per-repetition trajectory files");

  ConfigFlags fig2_flags;
  auto* fig2 = app.add_subcommand("fig2", "stateless learners, alpha 0.1, gamma 0.8");
  fig2_flags.attach(fig2, false);

  ReplicationOptions rep_options;
  std::vector<double> two_route_eps{0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::string two_route_out = "out/two-route";
  auto* two_route = app.add_subcommand("two-route", "initial network, two-step recommenders");
  two_route->add_option("--epsilons", two_route_eps, "constant epsilon grid")->delimiter(',');
  two_route->add_option("--reps", rep_options.reps, "repetitions (default 10)");
  two_route->add_option("--steps", rep_options.steps, "horizon (default 500)");
  two_route->add_option("--seed", rep_options.seed, "base seed");
  two_route->add_option("--threads", rep_options.threads, "worker threads");
  two_route->add_option("--out", two_route_out, "output directory");

  ReplicationOptions app_f_options;
  std::vector<double> app_f_eps{0.01, 0.05, 0.1, 0.2};
  std::vector<std::string> app_f_inits{"aligned", "misaligned", "uniform", "nash"};
  std::string app_f_out = "out/app-f";
  auto* app_f = app.add_subcommand("app-f", "three-state route recommenders, augmented network");
  app_f->add_option("--epsilons", app_f_eps, "constant epsilon grid")->delimiter(',');
  app_f->add_option("--inits", app_f_inits, "q-table initialisations")->delimiter(',');
  app_f->add_option("--reps", app_f_options.reps, "repetitions (default 40)");
  app_f->add_option("--steps", app_f_options.steps, "horizon (default 10000)");
  app_f->add_option("--seed", app_f_options.seed, "base seed");
  app_f->add_option("--threads", app_f_options.threads, "worker threads");
  app_f->add_option("--out", app_f_out, "output directory");

  TheoryOptions theory;
  std::string theory_out = "out/theory";
  auto* verify = app.add_subcommand("verify-theory", "reachability properties and coverage curve");
  verify->add_option("--trials", theory.trials, "random cases / Monte-Carlo trials");
  verify->add_option("--m-max", theory.m_max, "largest recommendation space in the coverage curve");
  verify->add_option("--k", theory.k, "actions for the coverage curve");
  verify->add_option("--seed", theory.seed, "base seed");
  verify->add_option("--out", theory_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep, summary_only);
    if (*fig2) return cmd_fig2(fig2_flags);
    if (*two_route) return cmd_two_route(rep_options, two_route_eps, two_route_out);
    if (*app_f) return cmd_app_f(app_f_options, app_f_inits, app_f_eps, app_f_out);
    if (*verify) return cmd_verify_theory(theory, theory_out);
  } catch (const InputError& e) {
    print_error("input", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
  return 0;
}
