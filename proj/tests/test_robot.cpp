#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flipper/rng.hpp"
#include "flipper/robot.hpp"

using namespace flipper;

namespace {

constexpr double kPi = std::numbers::pi;

// Rotation composition by 2x2 matrices, independent of rotate().
Vec2 rot(double a, Vec2 v) { return {std::cos(a) * v.x - std::sin(a) * v.z, std::sin(a) * v.x + std::cos(a) * v.z}; }

}  // namespace

TEST(Robot, GeometryDefaults) {
    const RobotGeometry g;
    EXPECT_DOUBLE_EQ(g.chassis_length, 0.76);
    EXPECT_DOUBLE_EQ(g.flipper_length, 0.536);
    EXPECT_DOUBLE_EQ(g.radius, 0.1);
    EXPECT_EQ(g.front_hinge(), (Vec2{0.38, 0.0}));
    EXPECT_EQ(g.rear_hinge(), (Vec2{-0.38, 0.0}));
}

TEST(Robot, IncrementIsPiOverTwelve) {
    const RobotState s = apply_action({}, Action(1, 0));
    EXPECT_DOUBLE_EQ(s.front_flipper, kPi / 12);
    EXPECT_DOUBLE_EQ(s.rear_flipper, 0.0);
    EXPECT_DOUBLE_EQ(apply_action({}, Action(0, -1)).rear_flipper, -kPi / 12);
}

TEST(Robot, ClampAtJointLimit) {
    RobotState s;
    s.front_flipper = kPi / 3;
    EXPECT_DOUBLE_EQ(apply_action(s, Action(1, 0)).front_flipper, kPi / 3);
    s.rear_flipper = -kPi / 3;
    EXPECT_DOUBLE_EQ(apply_action(s, Action(0, -1)).rear_flipper, -kPi / 3);
}

TEST(Robot, ClampIdempotent) {
    RobotState s;
    s.front_flipper = kPi / 3 - kPi / 12;
    const RobotState once = apply_action(s, Action(1, 0));
    const RobotState twice = apply_action(once, Action(1, 0));
    const RobotState thrice = apply_action(twice, Action(1, 0));
    EXPECT_DOUBLE_EQ(once.front_flipper, kPi / 3);
    EXPECT_EQ(once, twice);
    EXPECT_EQ(twice, thrice);
}

TEST(Robot, HoldActionIsIdentity) {
    const RobotState s{0.2, -0.3, 0.1, 1.5, 0.4};
    EXPECT_EQ(apply_action(s, Action(0, 0)), s);
}

TEST(Robot, PoseUntouchedByAction) {
    const RobotState s{0.2, -0.3, 0.1, 1.5, 0.4};
    const RobotState t = apply_action(s, Action(-1, 1));
    EXPECT_EQ(t.x, s.x);
    EXPECT_EQ(t.z, s.z);
    EXPECT_EQ(t.pitch, s.pitch);
}

TEST(Robot, ActionIdRoundTrip) {
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const Action a(i, j);
            EXPECT_EQ(a.id(), 3 * (i + 1) + (j + 1));
            EXPECT_EQ(Action::from_id(a.id()), a);
        }
    }
    EXPECT_THROW(Action::from_id(9), std::invalid_argument);
    EXPECT_THROW(Action::from_id(-1), std::invalid_argument);
    EXPECT_THROW(Action(2, 0), std::invalid_argument);
}

TEST(Envelope, FlatPoseCollinear) {
    const RobotGeometry g;
    const auto env = body_envelope(g, {0.0, 0.0, 0.0, 2.0, 0.1});
    double lo = 1e9;
    double hi = -1e9;
    for (const auto& c : env) {
        EXPECT_DOUBLE_EQ(c.axis.a.z, 0.1);
        EXPECT_NEAR(c.axis.b.z, 0.1, 1e-15);
        EXPECT_DOUBLE_EQ(c.radius, 0.1);
        lo = std::min({lo, c.axis.a.x, c.axis.b.x});
        hi = std::max({hi, c.axis.a.x, c.axis.b.x});
    }
    EXPECT_NEAR(hi - lo, g.chassis_length + 2 * g.flipper_length, 1e-12);
    EXPECT_EQ(env[0].part, BodyPart::chassis);
    EXPECT_EQ(env[1].part, BodyPart::front_flipper);
    EXPECT_EQ(env[2].part, BodyPart::rear_flipper);
}

TEST(Envelope, FrontFlipperDown) {
    const RobotGeometry g;
    const auto env = body_envelope(g, {-kPi / 3, 0.0, 0.0, 0.0, 0.5});
    EXPECT_NEAR(env[1].axis.b.z, 0.5 - g.flipper_length * std::sin(kPi / 3), 1e-12);
    EXPECT_NEAR(env[1].axis.b.x, 0.38 + g.flipper_length * std::cos(kPi / 3), 1e-12);
}

TEST(Envelope, PositiveRearAngleRaisesRearTip) {
    const RobotGeometry g;
    const auto env = body_envelope(g, {0.0, kPi / 6, 0.0, 0.0, 0.5});
    EXPECT_NEAR(env[2].axis.b.z, 0.5 + g.flipper_length * 0.5, 1e-12);
    EXPECT_LT(env[2].axis.b.x, env[2].axis.a.x);
}

TEST(Envelope, PitchedFlippersFollowChassis) {
    // compose: world = centre + R(pitch) * body point
    const RobotGeometry g;
    const double pitch = kPi / 6;
    const Vec2 c{1.0, 0.3};
    const auto env = body_envelope(g, {0.0, 0.0, pitch, c.x, c.z});
    const Vec2 front_tip = c + rot(pitch, {0.38 + 0.536, 0.0});
    const Vec2 rear_tip = c + rot(pitch, {-0.38 - 0.536, 0.0});
    EXPECT_NEAR(env[1].axis.b.x, front_tip.x, 1e-12);
    EXPECT_NEAR(env[1].axis.b.z, front_tip.z, 1e-12);
    EXPECT_NEAR(env[2].axis.b.x, rear_tip.x, 1e-12);
    EXPECT_NEAR(env[2].axis.b.z, rear_tip.z, 1e-12);
    const auto angle = [](const Segment& s) { return std::atan2(s.b.z - s.a.z, s.b.x - s.a.x); };
    EXPECT_NEAR(angle(env[1].axis), pitch, 1e-12);
    EXPECT_NEAR(angle(env[0].axis), pitch, 1e-12);
}

TEST(Envelope, ContinuityUnderAnglePerturbation) {
    const RobotGeometry g;
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        RobotState s{rng.uniform(-kPi / 3, kPi / 3), rng.uniform(-kPi / 3, kPi / 3), rng.uniform(-1.4, 1.4),
                     rng.uniform(-5, 5), rng.uniform(-1, 1)};
        const auto a = body_envelope(g, s);
        s.front_flipper += 1e-9;
        s.rear_flipper -= 1e-9;
        s.pitch += 1e-9;
        const auto b = body_envelope(g, s);
        for (int k = 0; k < 3; ++k) {
            worst = std::max({worst, norm(a[k].axis.a - b[k].axis.a), norm(a[k].axis.b - b[k].axis.b)});
        }
    }
    EXPECT_LE(worst, 1e-8 * (g.chassis_length + g.flipper_length));
}
