#include "flipper/trainer.hpp"

#include "flipper/evalkit.hpp"
#include "flipper/rng.hpp"

namespace flipper {
namespace {

// Stream tags passed to mix_seed.
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kActStream = 0xAC7;
constexpr std::uint64_t kTerrainStream = 0x7E44;
constexpr std::uint64_t kValidationStream = 0x5A11;

}  // namespace

nlohmann::json to_json(const EpisodeLog& e) {
    nlohmann::json j{{"episode", e.episode},
                     {"steps", e.steps},
                     {"return", e.total_return},
                     {"terminal", std::string(to_string(e.terminal))}};
    if (e.eval_success_rate) j["eval_success_rate"] = *e.eval_success_rate;
    return j;
}

std::vector<std::uint64_t> validation_seeds(const TrainConfig& config) {
    std::vector<std::uint64_t> out;
    const std::uint64_t base = mix_seed(config.seed, kValidationStream);
    for (int i = 0; i < config.eval_episodes; ++i) out.push_back(mix_seed(base, static_cast<std::uint64_t>(i)));
    return out;
}

ValidationScore validate(const QNetwork& net, const TerrainSpec& spec, const EnvConfig& env_config,
                         const std::vector<std::uint64_t>& seeds) {
    ValidationScore score;
    if (seeds.empty()) return score;
    Environment env(env_config);
    const Policy policy = greedy_policy(net);
    int successes = 0;
    double ret = 0.0;
    for (std::uint64_t s : seeds) {
        const Episode ep = rollout(env, spec, s, policy);
        successes += ep.terminal == Terminal::reached;
        ret += ep.total_return;
    }
    score.success_rate = static_cast<double>(successes) / static_cast<double>(seeds.size());
    score.mean_return = ret / static_cast<double>(seeds.size());
    return score;
}

TrainResult train(const TerrainSpec& spec, const EnvConfig& env_config, const TrainConfig& config,
                  const EpisodeSink& sink) {
    config.validate();
    NetworkShape shape = config.network;
    shape.n = env_config.n;
    shape.actions = kActionCount;

    QNetwork online(shape);
    online.initialize(mix_seed(config.seed, kInitStream));
    QNetwork target = online;
    Adam optimizer(online, AdamConfig{config.lr});
    ReplayBuffer buffer(static_cast<std::size_t>(config.capacity));
    Rng rng(mix_seed(config.seed, kActStream));
    const std::uint64_t terrain_base = mix_seed(config.seed, kTerrainStream);
    const auto val_seeds = validation_seeds(config);

    TrainResult result{online, online, std::nullopt, -1, 0, {}};
    std::optional<ValidationScore> best;
    Environment env(env_config);
    const auto warmup = static_cast<std::size_t>(std::max(config.batch, config.warmup_steps));

    for (int e = 0; e < config.episodes; ++e) {
        Observation obs = env.reset(spec, mix_seed(terrain_base, static_cast<std::uint64_t>(e)));
        EpisodeLog entry;
        entry.episode = e;
        while (!env.done()) {
            const Action a = select_action(online, obs, config.epsilon(result.total_steps), rng);
            StepOutcome out = env.step(a);
            entry.total_return += out.reward;
            buffer.push({obs, a.id(), out.reward, out.observation, out.terminal != Terminal::none});
            obs = std::move(out.observation);
            ++result.total_steps;
            if (buffer.size() >= warmup) train_step(online, target, buffer, optimizer, config, rng);
            if (result.total_steps % config.target_sync_period == 0) target = online;
        }
        entry.steps = env.t();
        entry.terminal = env.terminal();

        const bool last = e + 1 == config.episodes;
        if (!val_seeds.empty() && config.eval_every > 0 && ((e + 1) % config.eval_every == 0 || last)) {
            const ValidationScore score = validate(online, spec, env_config, val_seeds);
            entry.eval_success_rate = score.success_rate;
            if (!best || score.success_rate > best->success_rate ||
                (score.success_rate == best->success_rate && score.mean_return > best->mean_return)) {
                best = score;
                result.best = online;
                result.best_episode = e;
                result.best_success_rate = score.success_rate;
            }
        }
        result.log.push_back(entry);
        if (sink) sink(entry);
    }
    result.last = online;
    if (!best) result.best = online;
    return result;
}

}  // namespace flipper
