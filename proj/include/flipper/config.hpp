#pragma once

#include <filesystem>

#include "flipper/agent.hpp"
#include "flipper/env_config.hpp"
#include "json.hpp"

namespace flipper {

nlohmann::json to_json(const EnvConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const NetworkShape& s);

// Overwrite only the fields present in j; unknown keys or wrong types throw std::invalid_argument.
void apply_json(EnvConfig& c, const nlohmann::json& j);
void apply_json(TrainConfig& c, const nlohmann::json& j);
void apply_json(NetworkShape& s, const nlohmann::json& j);

// {"env": {...}, "train": {...}}, both optional.
struct RunConfig {
    EnvConfig env;
    TrainConfig train;
};

nlohmann::json to_json(const RunConfig& c);
void apply_json(RunConfig& c, const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j, int indent = 2);

}  // namespace flipper
