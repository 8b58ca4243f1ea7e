#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "flipper/agent.hpp"
#include "flipper/env.hpp"
#include "json.hpp"

namespace flipper {

struct EpisodeLog {
    int episode = 0;
    int steps = 0;
    double total_return = 0.0;
    Terminal terminal = Terminal::none;
    std::optional<double> eval_success_rate;
};

nlohmann::json to_json(const EpisodeLog& e);

struct TrainResult {
    // Network with the best periodic validation score (success rate, then mean return); the final
    // network when no evaluation ran.
    QNetwork best;
    QNetwork last;
    std::optional<double> best_success_rate;
    int best_episode = -1;
    long long total_steps = 0;
    std::vector<EpisodeLog> log;
};

struct ValidationScore {
    double success_rate = 0.0;
    double mean_return = 0.0;
};

// Validation seeds for periodic evaluation, disjoint by construction from the training stream.
std::vector<std::uint64_t> validation_seeds(const TrainConfig& config);

// Greedy rollouts from the scenario distribution at the given seeds.
ValidationScore validate(const QNetwork& net, const TerrainSpec& spec, const EnvConfig& env_config,
                         const std::vector<std::uint64_t>& seeds);

using EpisodeSink = std::function<void(const EpisodeLog&)>;

TrainResult train(const TerrainSpec& spec, const EnvConfig& env_config, const TrainConfig& config,
                  const EpisodeSink& sink = {});

}  // namespace flipper
