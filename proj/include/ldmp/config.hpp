#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "ldmp/harness.hpp"

namespace ldmp {

/// Applies one `key = value` setting. Keys match the long CLI flags
/// without dashes: network, agents, states, recommender, alpha, gamma,
/// epsilon, epsilon-decay, init, steps, reps, seed, noise-std, out, threads.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads a key-value file (one `key = value` per line, `#` comments) on top of `base`.
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

nlohmann::json to_json(const ExperimentConfig& config);

/// Version string baked in at build time (git describe when available).
std::string_view version_string();

/// {config, resolved_seed, version, wall_time} for one invocation.
nlohmann::json make_manifest(const ExperimentConfig& config, double wall_time_seconds,
                             const nlohmann::json& extra = nlohmann::json::object());

}  // namespace ldmp
