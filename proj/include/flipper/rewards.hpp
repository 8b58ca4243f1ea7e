#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "flipper/env_config.hpp"
#include "flipper/robot.hpp"
#include "flipper/terrain.hpp"

namespace flipper {

enum class TerrainMode { ascending, descending, level };

std::string_view to_string(TerrainMode mode);

struct CandidateAngle {
    double angle = 0.0;
    TerrainMode mode = TerrainMode::level;
};

// Reach beyond the flipper length searched for expanded terrain points (tip radius plus one
// decision step of travel, rounded up), and the height change
// that switches the mode away from level.
inline constexpr double kCandidateReach = 0.25;
inline constexpr double kModeThreshold = 0.05;

// Largest chassis-frame angle from the front hinge to terrain points raised by the radius, over
// x in (hinge, hinge + L_f + reach]. Mode compares the front half of the observation window with
// the height under the chassis centre.
CandidateAngle candidate_front_angle(const RobotGeometry& geometry, const TerrainProfile& terrain,
                                     const RobotState& state, int n = 15, double d = 0.2);

// Tracking offset added to the candidate angle for each mode.
double mode_offset(TerrainMode mode);

double reward_flipper(double front_flipper, const CandidateAngle& candidate, double lambda1);

// Last k+1 chassis pitch samples, oldest first.
class PitchHistory {
public:
    explicit PitchHistory(int k);

    void push(double pitch);
    void clear() { values_.clear(); }
    std::size_t size() const { return values_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::deque<double>& values() const { return values_; }

    // |theta(t+1)| - |theta(t)| for the two newest samples.
    double abs_change() const;
    // Mean |theta(i+1) - theta(i)| over the stored samples.
    double mean_change() const;

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

// Requires at least two samples.
double reward_pitch(const PitchHistory& history, double lambda2);

struct EndContext {
    double pitch = 0.0;
    bool flipped = false;
    double x = 0.0;
    double goal_x = 0.0;
    int t = 0;
    // Clearances of the two chassis end circles above the ground.
    double rear_end_clearance = 0.0;
    double front_end_clearance = 0.0;
    // x at t - stuck_window once that many steps exist.
    std::optional<double> x_window_ago;
};

inline constexpr double kGroundedClearance = 0.05;

struct EndResult {
    double reward = 0.0;
    Terminal terminal = Terminal::none;
};

// Precedence on simultaneous conditions: overturn, stuck, timeout, reached.
EndResult reward_end(const EndContext& context, const EnvConfig& config);

}  // namespace flipper
