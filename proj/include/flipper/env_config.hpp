#pragma once

#include <numbers>
#include <string_view>

#include "flipper/sim.hpp"

namespace flipper {

enum class Terminal { none, reached, overturn, timeout, stuck };

std::string_view to_string(Terminal terminal);
Terminal terminal_from_string(std::string_view name);

struct EnvConfig {
    int n = 15;            // observation bins
    double d = 0.2;        // bin width, m
    double dt = 0.6;       // s per decision step
    double speed = 0.2;    // track speed, m/s
    double lambda1 = 2.0;  // 1/rad
    double lambda2 = 5.0;  // 1/rad
    int k = 5;             // pitch window, steps
    double terminal_reward = 20.0;
    int t_max = 400;
    double max_traction_slope = 55.0 * kDegree;
    double noise_sigma = 0.0;
    double goal_pitch_tol = std::numbers::pi / 18.0;
    int stuck_window = 30;
    double stuck_eps = 0.01;
    double w_flip = 1.0;
    double w_pitch = 1.0;

    double step_distance() const { return speed * dt; }
    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

}  // namespace flipper
