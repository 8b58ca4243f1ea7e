#include "flipper/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace flipper {
namespace {

using Setter = std::function<void(const nlohmann::json&)>;

template <class T>
Setter field(T& target, const std::string& key) {
    return [&target, key](const nlohmann::json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw std::invalid_argument("config key '" + key + "' must be a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw std::invalid_argument("config key '" + key + "' must be an integer");
        } else {
            if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
        }
        target = v.get<T>();
    };
}

void apply_fields(const std::map<std::string, Setter>& fields, const nlohmann::json& j, const char* section) {
    if (!j.is_object()) throw std::invalid_argument(std::string(section) + " config must be an object");
    for (const auto& [key, value] : j.items()) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw std::invalid_argument(std::string("unknown ") + section + " config key '" + key + "'");
        it->second(value);
    }
}

}  // namespace

nlohmann::json to_json(const EnvConfig& c) {
    return {{"n", c.n},
            {"d", c.d},
            {"dt", c.dt},
            {"speed", c.speed},
            {"lambda1", c.lambda1},
            {"lambda2", c.lambda2},
            {"k", c.k},
            {"terminal_reward", c.terminal_reward},
            {"t_max", c.t_max},
            {"max_traction_slope", c.max_traction_slope},
            {"noise_sigma", c.noise_sigma},
            {"goal_pitch_tol", c.goal_pitch_tol},
            {"stuck_window", c.stuck_window},
            {"stuck_eps", c.stuck_eps},
            {"w_flip", c.w_flip},
            {"w_pitch", c.w_pitch}};
}

void apply_json(EnvConfig& c, const nlohmann::json& j) {
    const std::map<std::string, Setter> fields{
        {"n", field(c.n, "n")},
        {"d", field(c.d, "d")},
        {"dt", field(c.dt, "dt")},
        {"speed", field(c.speed, "speed")},
        {"lambda1", field(c.lambda1, "lambda1")},
        {"lambda2", field(c.lambda2, "lambda2")},
        {"k", field(c.k, "k")},
        {"terminal_reward", field(c.terminal_reward, "terminal_reward")},
        {"t_max", field(c.t_max, "t_max")},
        {"max_traction_slope", field(c.max_traction_slope, "max_traction_slope")},
        {"noise_sigma", field(c.noise_sigma, "noise_sigma")},
        {"goal_pitch_tol", field(c.goal_pitch_tol, "goal_pitch_tol")},
        {"stuck_window", field(c.stuck_window, "stuck_window")},
        {"stuck_eps", field(c.stuck_eps, "stuck_eps")},
        {"w_flip", field(c.w_flip, "w_flip")},
        {"w_pitch", field(c.w_pitch, "w_pitch")},
    };
    apply_fields(fields, j, "env");
    c.validate();
}

nlohmann::json to_json(const NetworkShape& s) {
    return {{"n", s.n},           {"encoder1", s.encoder1}, {"encoder2", s.encoder2},
            {"fusion", s.fusion}, {"head", s.head},         {"actions", s.actions}};
}

void apply_json(NetworkShape& s, const nlohmann::json& j) {
    const std::map<std::string, Setter> fields{
        {"n", field(s.n, "n")},
        {"encoder1", field(s.encoder1, "encoder1")},
        {"encoder2", field(s.encoder2, "encoder2")},
        {"fusion", field(s.fusion, "fusion")},
        {"head", field(s.head, "head")},
        {"actions", field(s.actions, "actions")},
    };
    apply_fields(fields, j, "network");
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"gamma", c.gamma},
            {"lr", c.lr},
            {"batch", c.batch},
            {"capacity", c.capacity},
            {"warmup_steps", c.warmup_steps},
            {"target_sync_period", c.target_sync_period},
            {"eps_start", c.eps_start},
            {"eps_end", c.eps_end},
            {"eps_decay_steps", c.eps_decay_steps},
            {"episodes", c.episodes},
            {"eval_every", c.eval_every},
            {"eval_episodes", c.eval_episodes},
            {"grad_clip", c.grad_clip},
            {"seed", c.seed},
            {"network", to_json(c.network)}};
}

void apply_json(TrainConfig& c, const nlohmann::json& j) {
    const std::map<std::string, Setter> fields{
        {"gamma", field(c.gamma, "gamma")},
        {"lr", field(c.lr, "lr")},
        {"batch", field(c.batch, "batch")},
        {"capacity", field(c.capacity, "capacity")},
        {"warmup_steps", field(c.warmup_steps, "warmup_steps")},
        {"target_sync_period", field(c.target_sync_period, "target_sync_period")},
        {"eps_start", field(c.eps_start, "eps_start")},
        {"eps_end", field(c.eps_end, "eps_end")},
        {"eps_decay_steps", field(c.eps_decay_steps, "eps_decay_steps")},
        {"episodes", field(c.episodes, "episodes")},
        {"eval_every", field(c.eval_every, "eval_every")},
        {"eval_episodes", field(c.eval_episodes, "eval_episodes")},
        {"grad_clip", field(c.grad_clip, "grad_clip")},
        {"seed", field(c.seed, "seed")},
        {"network", [&c](const nlohmann::json& v) { apply_json(c.network, v); }},
    };
    apply_fields(fields, j, "train");
    c.validate();
}

nlohmann::json to_json(const RunConfig& c) { return {{"env", to_json(c.env)}, {"train", to_json(c.train)}}; }

void apply_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "env") {
            apply_json(c.env, value);
        } else if (key == "train") {
            apply_json(c.train, value);
        } else {
            throw std::invalid_argument("unknown config section '" + key + "'");
        }
    }
    // The network input follows the observation width.
    if (!j.contains("train") || !j["train"].contains("network") || !j["train"]["network"].contains("n")) {
        c.train.network.n = c.env.n;
    }
    if (c.train.network.n != c.env.n) throw std::invalid_argument("train.network.n must equal env.n");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    RunConfig c;
    apply_json(c, read_json_file(path));
    return c;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j, int indent) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(indent) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace flipper
