#include "flipper/session.hpp"

#include <stdexcept>
#include <string>

#include "flipper/agent.hpp"
#include "flipper/config.hpp"

namespace flipper {

const std::array<std::string, kActionCount>& command_tokens() {
    // Indexed by action id.
    static const std::array<std::string, kActionCount> tokens{
        "front_down+rear_down", "front_down", "front_down+rear_up", "rear_down", "both_hold",
        "rear_up",              "front_up+rear_down", "front_up", "front_up+rear_up"};
    return tokens;
}

Action teleop_command_to_action(std::string_view token) {
    const auto& tokens = command_tokens();
    for (int id = 0; id < kActionCount; ++id) {
        if (tokens[static_cast<std::size_t>(id)] == token) return Action::from_id(id);
    }
    throw std::invalid_argument("unknown command token: " + std::string(token));
}

std::string action_to_command(Action action) { return command_tokens()[static_cast<std::size_t>(action.id())]; }

std::string_view to_string(SessionMode m) { return m == SessionMode::teleop ? "teleop" : "policy_live"; }

SessionMode session_mode_from_string(std::string_view name) {
    if (name == "teleop") return SessionMode::teleop;
    if (name == "policy_live") return SessionMode::policy_live;
    throw std::invalid_argument("unknown session mode: " + std::string(name));
}

std::string_view to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::idle: return "idle";
        case SessionStatus::running: return "running";
        case SessionStatus::paused: return "paused";
        case SessionStatus::terminal: return "terminal";
    }
    return "idle";
}

nlohmann::json error_frame(std::string_view message) { return {{"type", "error"}, {"message", std::string(message)}}; }

SessionCore::SessionCore(SessionOptions options)
    : options_(std::move(options)), env_(options_.env), mode_(options_.default_mode) {}

std::vector<nlohmann::json> SessionCore::handle_text(std::string_view text) {
    nlohmann::json message;
    try {
        message = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        return {error_frame("malformed message: not JSON")};
    }
    return handle(message);
}

std::vector<nlohmann::json> SessionCore::handle(const nlohmann::json& message) {
    if (!message.is_object() || !message.contains("type") || !message["type"].is_string()) {
        return {error_frame("malformed message: missing type")};
    }
    const std::string type = message["type"];
    try {
        if (type == "start") return start(message);
        if (type == "reset") {
            if (status_ == SessionStatus::idle) return {error_frame("reset before start")};
            nlohmann::json again{{"type", "start"}, {"course", course_name_}, {"mode", std::string(to_string(mode_))}};
            return start(again);
        }
        if (type == "command") {
            if (status_ == SessionStatus::idle) return {error_frame("command before start")};
            if (status_ == SessionStatus::terminal) return {error_frame("session is terminal; send reset or start")};
            if (!message.contains("cmd") || !message["cmd"].is_string()) return {error_frame("command needs a cmd token")};
            pending_ = teleop_command_to_action(message["cmd"].get<std::string>());
            return {};
        }
        if (type == "pause" || type == "resume") {
            const bool pause = type == "pause";
            const SessionStatus from = pause ? SessionStatus::running : SessionStatus::paused;
            if (status_ != from) return {error_frame(type + " is not valid while " + std::string(to_string(status_)))};
            status_ = pause ? SessionStatus::paused : SessionStatus::running;
            return {{{"type", "status"}, {"status", std::string(to_string(status_))}}};
        }
    } catch (const std::invalid_argument& e) {
        return {error_frame(e.what())};
    }
    return {error_frame("unknown message type: " + type)};
}

std::vector<nlohmann::json> SessionCore::start(const nlohmann::json& message) {
    EvalCourse course = options_.default_course;
    if (message.contains("course")) {
        if (!message["course"].is_string()) throw std::invalid_argument("course must be a string");
        course = eval_course_from_string(message["course"].get<std::string>());
    }
    SessionMode mode = options_.default_mode;
    if (message.contains("mode")) {
        if (!message["mode"].is_string()) throw std::invalid_argument("mode must be a string");
        mode = session_mode_from_string(message["mode"].get<std::string>());
    }
    if (mode == SessionMode::policy_live && !options_.policy) {
        throw std::invalid_argument("policy_live needs the server to be started with a checkpoint");
    }
    if (message.contains("seed")) {
        if (!message["seed"].is_number_unsigned()) throw std::invalid_argument("seed must be a non-negative integer");
        seed_ = message["seed"].get<std::uint64_t>();
    }
    mode_ = mode;
    course_name_ = std::string(to_string(course));
    spec_ = TerrainSpec::eval_course(course);
    env_.reset(spec_, seed_);
    records_.clear();
    pending_.reset();
    status_ = SessionStatus::running;
    return {frame(nullptr, std::nullopt, std::nullopt, true)};
}

nlohmann::json SessionCore::frame(const StepOutcome* outcome, std::optional<Action> action,
                                  const std::optional<Eigen::VectorXd>& q, bool with_terrain) const {
    const RobotState& s = env_.state();
    nlohmann::json f{{"type", "frame"},
                     {"t", env_.t()},
                     {"pose", {{"x", s.x}, {"z", s.z}, {"theta_R", s.pitch}}},
                     {"flippers", {s.front_flipper, s.rear_flipper}},
                     {"status", std::string(to_string(status_))},
                     {"mode", std::string(to_string(mode_))}};
    if (with_terrain) {
        f["terrain"] = env_.terrain().to_json();
        f["course"] = course_name_;
    }
    nlohmann::json reward{{"r_flipper", 0.0}, {"r_pitch", 0.0}, {"r_end", 0.0}, {"total", 0.0}};
    if (outcome) {
        reward = {{"r_flipper", outcome->info.r_flipper},
                  {"r_pitch", outcome->info.r_pitch},
                  {"r_end", outcome->info.r_end},
                  {"total", outcome->reward}};
        f["blocked"] = outcome->info.blocked;
    }
    f["reward"] = reward;
    if (action) f["action_id"] = action->id();
    if (q) f["q_values"] = std::vector<double>(q->data(), q->data() + q->size());
    f["terminal"] = std::string(to_string(env_.terminal()));
    return f;
}

std::vector<nlohmann::json> SessionCore::tick() {
    if (status_ != SessionStatus::running) return {};
    std::optional<Eigen::VectorXd> q;
    Action action;
    if (mode_ == SessionMode::policy_live) {
        q = options_.policy->forward(env_.observe());
        action = Action::from_id(argmax(*q));
    } else {
        action = pending_.value_or(Action(0, 0));
    }
    pending_.reset();
    const StepOutcome out = env_.step(action);
    records_.push_back(make_record(env_, action, out));
    if (env_.done()) status_ = SessionStatus::terminal;
    std::vector<nlohmann::json> msgs{frame(&out, action, q, false)};
    if (env_.done()) msgs.push_back(finish());
    return msgs;
}

nlohmann::json SessionCore::finish() {
    const Source source = mode_ == SessionMode::teleop ? Source::manual : Source::policy;
    const RunMetrics metrics = compute_metrics(records_, options_.env.dt, source);
    nlohmann::json end{{"type", "end"}, {"metrics", to_json(metrics)}, {"course", course_name_}};
    const int episode = episodes_++;
    if (!options_.record_dir.empty()) {
        std::filesystem::create_directories(options_.record_dir);
        const std::string stem = options_.id + "-" + std::to_string(episode);
        const auto traj = options_.record_dir / (stem + ".jsonl");
        write_trajectory(traj, records_);
        nlohmann::json meta = to_json(metrics);
        meta["course"] = course_name_;
        meta["mode"] = std::string(to_string(mode_));
        write_json_file(options_.record_dir / (stem + ".metrics.json"), meta);
        last_path_ = traj;
        end["trajectory"] = traj.string();
    }
    return end;
}

}  // namespace flipper
