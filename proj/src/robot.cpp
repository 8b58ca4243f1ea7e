#include "flipper/robot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flipper {

void Action::throw_invalid() { throw std::invalid_argument("action components must lie in {-1, 0, 1}"); }

RobotState apply_action(const RobotState& state, Action action) {
    RobotState next = state;
    next.front_flipper =
        std::clamp(state.front_flipper + action.front() * kFlipperIncrement, -kFlipperLimit, kFlipperLimit);
    next.rear_flipper =
        std::clamp(state.rear_flipper + action.rear() * kFlipperIncrement, -kFlipperLimit, kFlipperLimit);
    return next;
}

std::string_view to_string(BodyPart part) {
    switch (part) {
        case BodyPart::chassis: return "chassis";
        case BodyPart::front_flipper: return "front_flipper";
        case BodyPart::rear_flipper: return "rear_flipper";
    }
    return "chassis";
}

BodyEnvelope body_envelope(const RobotGeometry& geometry, const RobotState& state) {
    const Vec2 centre{state.x, state.z};
    const Vec2 axis{std::cos(state.pitch), std::sin(state.pitch)};
    const double half = 0.5 * geometry.chassis_length;
    const Vec2 front_hinge = centre + axis * half;
    const Vec2 rear_hinge = centre - axis * half;

    const double front_angle = state.pitch + state.front_flipper;
    const Vec2 front_tip =
        front_hinge + Vec2{std::cos(front_angle), std::sin(front_angle)} * geometry.flipper_length;
    // Rear flipper points backwards along the chassis; a positive angle lifts its tip.
    const double rear_angle = std::numbers::pi + state.pitch - state.rear_flipper;
    const Vec2 rear_tip =
        rear_hinge + Vec2{std::cos(rear_angle), std::sin(rear_angle)} * geometry.flipper_length;

    return {
        Capsule{{rear_hinge, front_hinge}, geometry.radius, BodyPart::chassis},
        Capsule{{front_hinge, front_tip}, geometry.radius, BodyPart::front_flipper},
        Capsule{{rear_hinge, rear_tip}, geometry.radius, BodyPart::rear_flipper},
    };
}

}  // namespace flipper
