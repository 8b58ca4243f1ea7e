#include "flipper/trajectory.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace flipper {

TrajectoryRecord make_record(const Environment& env, Action action, const StepOutcome& outcome) {
    const RobotState& s = env.state();
    TrajectoryRecord r;
    r.t = env.t();
    r.x = s.x;
    r.z = s.z;
    r.theta_R = s.pitch;
    r.theta_f1 = s.front_flipper;
    r.theta_f2 = s.rear_flipper;
    r.action_id = action.id();
    r.r_flipper = outcome.info.r_flipper;
    r.r_pitch = outcome.info.r_pitch;
    r.r_end = outcome.info.r_end;
    r.reward = outcome.reward;
    r.blocked = outcome.info.blocked;
    r.terminal = outcome.terminal;
    return r;
}

nlohmann::json to_json(const TrajectoryRecord& r) {
    return {{"t", r.t},
            {"x", r.x},
            {"z", r.z},
            {"theta_R", r.theta_R},
            {"theta_f1", r.theta_f1},
            {"theta_f2", r.theta_f2},
            {"action_id", r.action_id},
            {"r_flipper", r.r_flipper},
            {"r_pitch", r.r_pitch},
            {"r_end", r.r_end},
            {"reward", r.reward},
            {"blocked", r.blocked},
            {"terminal", std::string(to_string(r.terminal))}};
}

namespace {

double number(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw SchemaError(std::string("trajectory field '") + key + "' missing or not a number");
    return it->get<double>();
}

int integer(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) throw SchemaError(std::string("trajectory field '") + key + "' missing or not an integer");
    return it->get<int>();
}

}  // namespace

TrajectoryRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("trajectory record is not an object");
    TrajectoryRecord r;
    r.t = integer(j, "t");
    r.x = number(j, "x");
    r.z = number(j, "z");
    r.theta_R = number(j, "theta_R");
    r.theta_f1 = number(j, "theta_f1");
    r.theta_f2 = number(j, "theta_f2");
    r.action_id = integer(j, "action_id");
    if (r.action_id < 0 || r.action_id >= kActionCount) throw SchemaError("trajectory action_id out of range");
    r.r_flipper = number(j, "r_flipper");
    r.r_pitch = number(j, "r_pitch");
    r.r_end = number(j, "r_end");
    r.reward = number(j, "reward");
    const auto blocked = j.find("blocked");
    if (blocked == j.end() || !blocked->is_boolean()) throw SchemaError("trajectory field 'blocked' missing or not a boolean");
    r.blocked = blocked->get<bool>();
    const auto terminal = j.find("terminal");
    if (terminal == j.end() || !terminal->is_string()) throw SchemaError("trajectory field 'terminal' missing or not a string");
    try {
        r.terminal = terminal_from_string(terminal->get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return r;
}

void validate_trajectory(const std::vector<TrajectoryRecord>& records) {
    if (records.empty()) throw SchemaError("trajectory is empty");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].t != static_cast<int>(i) + 1) throw SchemaError("trajectory steps must run 1..T in order");
        if (i + 1 < records.size() && records[i].terminal != Terminal::none) {
            throw SchemaError("terminal record before the end of the trajectory");
        }
    }
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

void write_trajectory(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_trajectory(out, records);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<TrajectoryRecord> read_trajectory(std::istream& in) {
    std::vector<TrajectoryRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError("line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(record_from_json(j));
    }
    validate_trajectory(out);
    return out;
}

std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_trajectory(in);
}

}  // namespace flipper
