#include "flipper/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flipper {

std::string_view to_string(TerrainMode mode) {
    switch (mode) {
        case TerrainMode::ascending: return "ascending";
        case TerrainMode::descending: return "descending";
        case TerrainMode::level: return "level";
    }
    return "level";
}

CandidateAngle candidate_front_angle(const RobotGeometry& geometry, const TerrainProfile& terrain,
                                     const RobotState& state, int n, double d) {
    const Vec2 hinge = body_envelope(geometry, state)[0].axis.b;
    const double lo = std::max(hinge.x, terrain.x_min());
    const double hi = std::min(hinge.x + geometry.flipper_length + kCandidateReach, terrain.x_max());

    double best = -std::numeric_limits<double>::infinity();
    const auto consider = [&](double x, double z) {
        const double a = std::atan2(z + geometry.radius - hinge.z, x - hinge.x) - state.pitch;
        best = std::max(best, a);
    };
    if (hi > hinge.x) {
        const double spacing = d / 10.0;
        for (int j = 1;; ++j) {
            const double x = hinge.x + j * spacing;
            if (x > hi) break;
            if (x > lo) consider(x, terrain.height_at(x));
        }
        if (hi > lo) consider(hi, terrain.height_at(hi));
        for (const Vec2 v : terrain.vertices()) {
            if (v.x > hinge.x && v.x <= hi) consider(v.x, v.z);
        }
    }

    CandidateAngle out;
    if (!std::isfinite(best)) {
        out.angle = -kFlipperLimit;
        out.mode = TerrainMode::descending;
        return out;
    }
    out.angle = std::clamp(best, -kFlipperLimit, kFlipperLimit);

    const int samples = std::max(1, 5 * n);
    const double reach = 0.5 * n * d;
    double sum = 0.0;
    for (int j = 1; j <= samples; ++j) sum += terrain.height_clamped(state.x + reach * j / samples);
    const double ahead = sum / samples - terrain.height_clamped(state.x);
    if (ahead > kModeThreshold) {
        out.mode = TerrainMode::ascending;
    } else if (ahead < -kModeThreshold) {
        out.mode = TerrainMode::descending;
    } else {
        out.mode = TerrainMode::level;
    }
    return out;
}

double mode_offset(TerrainMode mode) {
    switch (mode) {
        case TerrainMode::ascending: return -std::numbers::pi / 36.0;
        case TerrainMode::descending: return std::numbers::pi / 36.0;
        case TerrainMode::level: return 0.0;
    }
    return 0.0;
}

double reward_flipper(double front_flipper, const CandidateAngle& candidate, double lambda1) {
    const double dev = std::abs(front_flipper - (candidate.angle + mode_offset(candidate.mode)));
    if (dev > 1.0 / lambda1) return -1.0;
    return -lambda1 * dev;
}

PitchHistory::PitchHistory(int k) {
    if (k < 2) throw std::invalid_argument("pitch window k must be at least 2");
    capacity_ = static_cast<std::size_t>(k) + 1;
}

void PitchHistory::push(double pitch) {
    values_.push_back(pitch);
    if (values_.size() > capacity_) values_.pop_front();
}

double PitchHistory::abs_change() const {
    if (values_.size() < 2) throw std::logic_error("pitch history needs two samples");
    return std::abs(values_.back()) - std::abs(values_[values_.size() - 2]);
}

double PitchHistory::mean_change() const {
    if (values_.size() < 2) throw std::logic_error("pitch history needs two samples");
    double sum = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) sum += std::abs(values_[i] - values_[i - 1]);
    return sum / static_cast<double>(values_.size() - 1);
}

double reward_pitch(const PitchHistory& history, double lambda2) {
    if (std::abs(history.values().back()) > std::numbers::pi / 4.0 && history.abs_change() > 0.0) return -1.0;
    const double mean = history.mean_change();
    if (mean > 1.0 / lambda2) return -1.0;
    return -lambda2 * mean;
}

EndResult reward_end(const EndContext& c, const EnvConfig& config) {
    const double r = config.terminal_reward;
    if (c.flipped || std::abs(c.pitch) >= std::numbers::pi / 3.0) return {-r, Terminal::overturn};
    if (c.x_window_ago && c.x - *c.x_window_ago < config.stuck_eps) return {-r, Terminal::stuck};
    if (c.t >= config.t_max) return {-r, Terminal::timeout};
    if (c.x >= c.goal_x && std::abs(c.pitch) <= config.goal_pitch_tol && c.rear_end_clearance <= kGroundedClearance &&
        c.front_end_clearance <= kGroundedClearance) {
        return {r, Terminal::reached};
    }
    return {};
}

}  // namespace flipper
