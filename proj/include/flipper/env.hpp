#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flipper/env_config.hpp"
#include "flipper/rewards.hpp"
#include "flipper/robot.hpp"
#include "flipper/sim.hpp"
#include "flipper/terrain.hpp"

namespace flipper {

// [H / 1 m, theta_f1, theta_f2, theta_R each / (pi/3)], width n + 3.
using Observation = std::vector<double>;

enum class Scenario { flat, step, stair, course, fixed };

std::string_view to_string(Scenario scenario);
Scenario scenario_from_string(std::string_view name);

// What env_reset builds. step and stair draw their parameters from the seed.
struct TerrainSpec {
    Scenario scenario = Scenario::flat;
    EvalCourse course = EvalCourse::single_step_04;
    std::optional<TerrainProfile> profile;

    static TerrainSpec flat() { return {}; }
    static TerrainSpec step() { return {Scenario::step, EvalCourse::single_step_04, std::nullopt}; }
    static TerrainSpec stair() { return {Scenario::stair, EvalCourse::single_step_04, std::nullopt}; }
    static TerrainSpec eval_course(EvalCourse c) { return {Scenario::course, c, std::nullopt}; }
    static TerrainSpec fixed(TerrainProfile p) { return {Scenario::fixed, EvalCourse::single_step_04, std::move(p)}; }
};

// Training scenario parameters.
inline constexpr double kTrainStepMin = 0.05;
inline constexpr double kTrainStepMax = 0.4;
inline constexpr double kTrainStepRun = 1.5;
inline constexpr double kFlatLength = 4.0;
inline constexpr double kTrainStairRise = 0.2;
inline constexpr double kTrainStairRun = 0.3;

TerrainProfile make_terrain(const TerrainSpec& spec, std::uint64_t seed);

struct StepInfo {
    double r_flipper = 0.0;
    double r_pitch = 0.0;
    double r_end = 0.0;
    bool blocked = false;
    CandidateAngle candidate;
};

struct StepOutcome {
    Observation observation;
    double reward = 0.0;
    Terminal terminal = Terminal::none;
    StepInfo info;
};

class Environment {
public:
    explicit Environment(EnvConfig config = {}, RobotGeometry geometry = {}, SimConfig sim = {});

    Observation reset(const TerrainSpec& spec, std::uint64_t seed);
    // Throws std::logic_error before reset or after a terminal step.
    StepOutcome step(Action action);

    Observation observe() const;

    const EnvConfig& config() const { return config_; }
    const RobotGeometry& geometry() const { return geometry_; }
    const TerrainProfile& terrain() const { return *terrain_; }
    const RobotState& state() const { return state_; }
    int t() const { return t_; }
    bool done() const { return terminal_ != Terminal::none; }
    Terminal terminal() const { return terminal_; }
    const PitchHistory& pitch_history() const { return pitch_history_; }

private:
    EnvConfig config_;
    RobotGeometry geometry_;
    SimConfig sim_;
    std::optional<TerrainProfile> terrain_;
    RobotState state_;
    PitchHistory pitch_history_;
    std::vector<double> x_log_;
    std::uint64_t seed_ = 0;
    int t_ = 0;
    Terminal terminal_ = Terminal::none;
};

}  // namespace flipper
