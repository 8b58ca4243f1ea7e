#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flipper/env.hpp"
#include "flipper/evalkit.hpp"
#include "flipper/network.hpp"
#include "flipper/trajectory.hpp"
#include "json.hpp"

namespace flipper {

// Teleop command tokens: both_hold, front_up, front_down, rear_up, rear_down and the four
// "front_*+rear_*" combinations. Throws std::invalid_argument on unknown tokens.
Action teleop_command_to_action(std::string_view token);
std::string action_to_command(Action action);
const std::array<std::string, kActionCount>& command_tokens();

enum class SessionMode { teleop, policy_live };
enum class SessionStatus { idle, running, paused, terminal };

std::string_view to_string(SessionMode m);
SessionMode session_mode_from_string(std::string_view name);
std::string_view to_string(SessionStatus s);

struct SessionOptions {
    std::string id = "session";
    EnvConfig env;
    EvalCourse default_course = EvalCourse::single_step_04;
    SessionMode default_mode = SessionMode::teleop;
    // Empty: episodes are not persisted.
    std::filesystem::path record_dir;
    // Needed for policy_live sessions.
    std::shared_ptr<const QNetwork> policy;
};

// One client's episode state machine. Every call returns the messages to send back, in order.
// Commands received between ticks overwrite each other; the newest one drives the next step and
// a tick without a command holds both flippers.
class SessionCore {
public:
    explicit SessionCore(SessionOptions options);

    std::vector<nlohmann::json> handle_text(std::string_view text);
    std::vector<nlohmann::json> handle(const nlohmann::json& message);
    // One env step when running, nothing otherwise.
    std::vector<nlohmann::json> tick();

    SessionStatus status() const { return status_; }
    SessionMode mode() const { return mode_; }
    const std::vector<TrajectoryRecord>& records() const { return records_; }
    std::optional<std::filesystem::path> last_trajectory_path() const { return last_path_; }
    std::optional<Action> pending_command() const { return pending_; }
    int episode_count() const { return episodes_; }

private:
    std::vector<nlohmann::json> start(const nlohmann::json& message);
    nlohmann::json frame(const StepOutcome* outcome, std::optional<Action> action,
                         const std::optional<Eigen::VectorXd>& q, bool with_terrain) const;
    nlohmann::json finish();

    SessionOptions options_;
    Environment env_;
    SessionMode mode_;
    SessionStatus status_ = SessionStatus::idle;
    TerrainSpec spec_;
    std::string course_name_;
    std::optional<Action> pending_;
    std::vector<TrajectoryRecord> records_;
    std::optional<std::filesystem::path> last_path_;
    std::uint64_t seed_ = 0;
    int episodes_ = 0;
};

nlohmann::json error_frame(std::string_view message);

}  // namespace flipper
