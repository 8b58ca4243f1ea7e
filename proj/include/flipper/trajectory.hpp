#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "flipper/env.hpp"
#include "json.hpp"

namespace flipper {

// One line of the episode log, written after each step (t starts at 1).
struct TrajectoryRecord {
    int t = 0;
    double x = 0.0;
    double z = 0.0;
    double theta_R = 0.0;
    double theta_f1 = 0.0;
    double theta_f2 = 0.0;
    int action_id = 0;
    double r_flipper = 0.0;
    double r_pitch = 0.0;
    double r_end = 0.0;
    double reward = 0.0;
    bool blocked = false;
    Terminal terminal = Terminal::none;

    bool operator==(const TrajectoryRecord&) const = default;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

TrajectoryRecord make_record(const Environment& env, Action action, const StepOutcome& outcome);

nlohmann::json to_json(const TrajectoryRecord& r);
// Throws SchemaError on missing fields, wrong types or unknown terminal names.
TrajectoryRecord record_from_json(const nlohmann::json& j);

// Whole-log checks: non-empty, t = 1..T consecutively, only the last record terminal.
void validate_trajectory(const std::vector<TrajectoryRecord>& records);

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records);
void write_trajectory(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& records);
std::vector<TrajectoryRecord> read_trajectory(std::istream& in);
std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path);

}  // namespace flipper
