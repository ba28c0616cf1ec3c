#include "ldmp/config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#ifndef LDMP_VERSION
#define LDMP_VERSION "unknown"
#endif

namespace ldmp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw InputError(fmt::format("setting '{}': cannot parse '{}'", key, value));
  }
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "network") config.network = parse_network(value);
  else if (key == "agents") config.agents = parse_number<int>(key, value);
  else if (key == "states") config.states = parse_number<int>(key, value);
  else if (key == "recommender") config.recommender = std::string(value);
  else if (key == "alpha") config.params.alpha = parse_number<double>(key, value);
  else if (key == "gamma") config.params.gamma = parse_number<double>(key, value);
  else if (key == "epsilon") config.epsilon = parse_number<double>(key, value);
  else if (key == "epsilon-decay") {
    if (value == "none") config.epsilon_decay_to.reset();
    else config.epsilon_decay_to = parse_number<double>(key, value);
  }
  else if (key == "init") config.init = parse_init(value);
  else if (key == "steps") config.steps = parse_number<long>(key, value);
  else if (key == "reps") config.reps = parse_number<int>(key, value);
  else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "noise-std") config.noise_std = parse_number<double>(key, value);
  else if (key == "out") config.out_dir = std::string(value);
  else if (key == "threads") config.threads = parse_number<int>(key, value);
  else throw InputError(fmt::format("unknown setting '{}'", key));
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream file(path);
  if (!file) throw InputError("cannot read config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("{}:{}: expected 'key = value'", path.string(), line_no));
    }
    try {
      apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return base;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["network"] = std::string(to_string(c.network));
  j["agents"] = c.agents;
  j["states"] = c.states;
  j["actions"] = c.num_actions();
  j["recommender"] = c.recommender;
  j["alpha"] = c.params.alpha;
  j["gamma"] = c.params.gamma;
  j["epsilon"] = c.epsilon;
  j["epsilon_decay_to"] = c.epsilon_decay_to ? nlohmann::json(*c.epsilon_decay_to) : nlohmann::json(nullptr);
  j["init"] = {{"kind", std::string(to_string(c.init.kind))}, {"lo", c.init.lo}, {"hi", c.init.hi}};
  j["steps"] = c.steps;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["noise_std"] = c.noise_std;
  j["out"] = c.out_dir;
  return j;
}

std::string_view version_string() { return LDMP_VERSION; }

nlohmann::json make_manifest(const ExperimentConfig& config, double wall_time_seconds, const nlohmann::json& extra) {
  nlohmann::json manifest;
  manifest["config"] = to_json(config);
  manifest["resolved_seed"] = config.seed;
  manifest["version"] = std::string(version_string());
  manifest["wall_time"] = wall_time_seconds;
  for (const auto& [key, value] : extra.items()) manifest[key] = value;
  return manifest;
}

}  // namespace ldmp
