#pragma once

#include <array>
#include <numbers>
#include <string_view>

#include "flipper/geometry.hpp"

namespace flipper {

inline constexpr double kFlipperIncrement = std::numbers::pi / 12.0;
inline constexpr double kFlipperLimit = std::numbers::pi / 3.0;
inline constexpr int kActionCount = 9;

struct RobotGeometry {
    double chassis_length = 0.76;
    double flipper_length = 0.536;
    double radius = 0.1;

    // Hinges in the body frame, on the chassis axis endpoints.
    Vec2 front_hinge() const { return {0.5 * chassis_length, 0.0}; }
    Vec2 rear_hinge() const { return {-0.5 * chassis_length, 0.0}; }
    double half_extent() const { return 0.5 * chassis_length + flipper_length + radius; }
};

// Flipper angles are relative to the chassis axis, positive above it. Pitch is the chassis angle
// against the gravity-aligned frame, positive nose up. (x, z) is the chassis centre in world.
struct RobotState {
    double front_flipper = 0.0;
    double rear_flipper = 0.0;
    double pitch = 0.0;
    double x = 0.0;
    double z = 0.0;

    bool operator==(const RobotState&) const = default;
};

// One of the nine flipper increment combinations. front/rear are in {-1, 0, +1}; +1 increases the
// flipper angle, lifting that flipper's tip away from the ground.
class Action {
public:
    constexpr Action() = default;
    constexpr Action(int front, int rear) : front_(front), rear_(rear) { validate(); }

    static constexpr Action from_id(int id) {
        if (id < 0 || id >= kActionCount) throw_invalid();
        return Action(id / 3 - 1, id % 3 - 1);
    }

    constexpr int id() const { return 3 * (front_ + 1) + (rear_ + 1); }
    constexpr int front() const { return front_; }
    constexpr int rear() const { return rear_; }
    constexpr bool operator==(const Action&) const = default;

private:
    constexpr void validate() const {
        if (front_ < -1 || front_ > 1 || rear_ < -1 || rear_ > 1) throw_invalid();
    }
    [[noreturn]] static void throw_invalid();

    int front_ = 0;
    int rear_ = 0;
};

// Applies the increments with saturation at the joint limits; pose is untouched.
RobotState apply_action(const RobotState& state, Action action);

enum class BodyPart { chassis, front_flipper, rear_flipper };
std::string_view to_string(BodyPart part);

struct Capsule {
    Segment axis;
    double radius = 0.0;
    BodyPart part = BodyPart::chassis;
};

using BodyEnvelope = std::array<Capsule, 3>;

// World-frame capsules for chassis, front flipper, rear flipper (in that order).
BodyEnvelope body_envelope(const RobotGeometry& geometry, const RobotState& state);

}  // namespace flipper
