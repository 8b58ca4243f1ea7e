#include "flipper/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flipper/rng.hpp"

namespace flipper {

std::string_view to_string(Terminal terminal) {
    switch (terminal) {
        case Terminal::none: return "none";
        case Terminal::reached: return "reached";
        case Terminal::overturn: return "overturn";
        case Terminal::timeout: return "timeout";
        case Terminal::stuck: return "stuck";
    }
    return "none";
}

Terminal terminal_from_string(std::string_view name) {
    for (Terminal t : {Terminal::none, Terminal::reached, Terminal::overturn, Terminal::timeout, Terminal::stuck}) {
        if (to_string(t) == name) return t;
    }
    throw std::invalid_argument("unknown terminal: " + std::string(name));
}

void EnvConfig::validate() const {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (!(d > 0.0) || !(dt > 0.0) || !(speed > 0.0)) throw std::invalid_argument("d, dt and speed must be positive");
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw std::invalid_argument("lambda1 and lambda2 must be positive");
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
    if (stuck_window < 1) throw std::invalid_argument("stuck_window must be at least 1");
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be non-negative");
}

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::flat: return "flat";
        case Scenario::step: return "step";
        case Scenario::stair: return "stair";
        case Scenario::course: return "course";
        case Scenario::fixed: return "fixed";
    }
    return "flat";
}

Scenario scenario_from_string(std::string_view name) {
    for (Scenario s : {Scenario::flat, Scenario::step, Scenario::stair, Scenario::course, Scenario::fixed}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown scenario: " + std::string(name));
}

TerrainProfile make_terrain(const TerrainSpec& spec, std::uint64_t seed) {
    switch (spec.scenario) {
        case Scenario::flat: return make_flat(kFlatLength);
        case Scenario::step: {
            Rng rng(seed);
            const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
            const double height = rng.uniform(kTrainStepMin, kTrainStepMax);
            return generate_step(sign * height, kTrainStepRun, mix_seed(seed, 1));
        }
        case Scenario::stair: {
            Rng rng(seed);
            const int count = 3 + static_cast<int>(rng.below(3));
            const auto direction = rng.below(2) == 0 ? StairDirection::up : StairDirection::down;
            return generate_stairs(kTrainStairRise, kTrainStairRun, count, direction, mix_seed(seed, 1));
        }
        case Scenario::course: return generate_eval_course(spec.course);
        case Scenario::fixed:
            if (!spec.profile) throw std::invalid_argument("fixed terrain spec without a profile");
            return *spec.profile;
    }
    throw std::invalid_argument("unknown scenario");
}

Environment::Environment(EnvConfig config, RobotGeometry geometry, SimConfig sim)
    : config_(config), geometry_(geometry), sim_(sim), pitch_history_(config.k) {
    config_.validate();
    sim_.max_traction_slope = config_.max_traction_slope;
}

Observation Environment::reset(const TerrainSpec& spec, std::uint64_t seed) {
    terrain_ = make_terrain(spec, seed);
    seed_ = seed;
    t_ = 0;
    terminal_ = Terminal::none;
    state_ = RobotState{0.0, 0.0, 0.0, terrain_->metadata().start_x, 0.0};
    const SettleResult s = settle(geometry_, *terrain_, state_.x, 0.0, 0.0, 0.0, sim_);
    state_.z = s.z;
    state_.pitch = s.pitch;
    pitch_history_.clear();
    pitch_history_.push(state_.pitch);
    x_log_.assign(1, state_.x);
    return observe();
}

Observation Environment::observe() const {
    if (!terrain_) throw std::logic_error("environment used before reset");
    const HeightObservation h = sample_height_observation(*terrain_, {state_.x, state_.z}, config_.n, config_.d,
                                                          config_.noise_sigma, mix_seed(seed_, static_cast<std::uint64_t>(t_)));
    Observation obs(h.bins.begin(), h.bins.end());
    obs.push_back(state_.front_flipper / kFlipperLimit);
    obs.push_back(state_.rear_flipper / kFlipperLimit);
    obs.push_back(state_.pitch / kFlipperLimit);
    return obs;
}

StepOutcome Environment::step(Action action) {
    if (!terrain_) throw std::logic_error("environment used before reset");
    if (done()) throw std::logic_error("step called on a terminal episode");

    const RobotState actuated = actuate(geometry_, *terrain_, state_, action, sim_);
    const AdvanceResult adv = advance(geometry_, *terrain_, actuated, config_.step_distance(), sim_);
    state_ = adv.state;
    ++t_;
    pitch_history_.push(state_.pitch);
    x_log_.push_back(state_.x);

    StepOutcome out;
    out.info.blocked = adv.blocked;
    out.info.candidate = candidate_front_angle(geometry_, *terrain_, state_, config_.n, config_.d);
    out.info.r_flipper = reward_flipper(state_.front_flipper, out.info.candidate, config_.lambda1);
    out.info.r_pitch = reward_pitch(pitch_history_, config_.lambda2);

    const auto env = body_envelope(geometry_, state_);
    EndContext ctx;
    ctx.pitch = state_.pitch;
    ctx.flipped = adv.flipped;
    ctx.x = state_.x;
    ctx.goal_x = terrain_->metadata().goal_x;
    ctx.t = t_;
    ctx.rear_end_clearance = point_clearance(*terrain_, env[0].axis.a, geometry_.radius);
    ctx.front_end_clearance = point_clearance(*terrain_, env[0].axis.b, geometry_.radius);
    if (t_ >= config_.stuck_window) ctx.x_window_ago = x_log_[static_cast<std::size_t>(t_ - config_.stuck_window)];
    const EndResult end = reward_end(ctx, config_);
    out.info.r_end = end.reward;
    out.terminal = end.terminal;
    terminal_ = end.terminal;

    out.reward = config_.w_flip * out.info.r_flipper + config_.w_pitch * out.info.r_pitch + out.info.r_end;
    out.observation = observe();
    return out;
}

}  // namespace flipper
