#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>

#include "flipper/rng.hpp"
#include "flipper/sim.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace flipper;

namespace {

using scenes::random_scenes;
using scenes::same_bits;
using scenes::random_terrain;

constexpr double kPi = std::numbers::pi;
const RobotGeometry kGeom;

TerrainProfile step_at(double face_x, double h, double plateau = 2.0) {
    return TerrainBuilder(face_x - 3.0, 0.0).flat_to(face_x).face(h).flat(plateau).build(TerrainKind::single_step, {});
}

// Bisection for the root of f on [lo, hi], f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(F f, double lo, double hi) {
    const bool lo_neg = f(lo) < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0.0) == lo_neg ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}


}  // namespace

TEST(Settle, FlatGroundLevelPose) {
    const auto flat = make_flat(6.0);
    for (double p0 : {-0.3, 0.0, 0.2}) {
        const auto s = settle(kGeom, flat, 3.0, 0.0, 0.0, p0);
        EXPECT_TRUE(s.stable);
        EXPECT_FALSE(s.flipped);
        EXPECT_NEAR(s.pitch, 0.0, 1e-9);
        EXPECT_NEAR(s.z, kGeom.radius, 1e-9);
        // support reaches both flipper tips
        double lo = 1e9, hi = -1e9;
        for (const auto& c : s.contacts) {
            lo = std::min(lo, c.point.x);
            hi = std::max(hi, c.point.x);
        }
        EXPECT_LT(lo, 3.0 - 0.9);
        EXPECT_GT(hi, 3.0 + 0.9);
    }
}

TEST(Settle, BridgesStepEdge) {
    // lip 0.1 m ahead of the centre; rear flipper tip on the lower level, chassis side on the lip
    const double h = 0.1;
    const double a = 0.1;
    const double reach = 0.5 * kGeom.chassis_length + kGeom.flipper_length;
    const auto t = step_at(2.0 + a, h);
    const auto s = settle(kGeom, t, 2.0, 0.0, 0.0, 0.0);
    ASSERT_TRUE(s.stable);
    // line tangent to the rear end circle on z = 0 and the lip vertex (2 + a, h)
    const double r = kGeom.radius;
    const double expected = bisect(
        [&](double th) { return a * std::sin(th) + (r + reach * std::sin(th) - h) * std::cos(th) - r; }, 0.0, 0.7);
    EXPECT_GT(s.pitch, 0.0);
    EXPECT_NEAR(s.pitch, expected, 1e-6);
    EXPECT_NEAR(s.z, kGeom.radius + reach * std::sin(expected), 1e-6);
}

TEST(Settle, FrontFlipperDownOnFlat) {
    // rear flipper raised so the chassis rear end and the front flipper tip co-support
    const auto flat = make_flat(6.0);
    const double f = -kPi / 3;
    const auto s = settle(kGeom, flat, 3.0, f, kPi / 3, 0.0);
    ASSERT_TRUE(s.stable);
    const Vec2 rear{-0.5 * kGeom.chassis_length, 0.0};
    const Vec2 tip{0.5 * kGeom.chassis_length + kGeom.flipper_length * std::cos(f), kGeom.flipper_length * std::sin(f)};
    const auto world_z = [](Vec2 p, double th) { return std::sin(th) * p.x + std::cos(th) * p.z; };
    const double expected = bisect([&](double th) { return world_z(rear, th) - world_z(tip, th); }, 0.0, 1.0);
    EXPECT_NEAR(expected, 24.3 * kPi / 180.0, 0.05 * kPi / 180.0);
    EXPECT_NEAR(s.pitch, expected, 1e-6);
    EXPECT_NEAR(s.z, kGeom.radius - world_z(rear, expected), 1e-6);
}

TEST(Settle, OutOfRange) {
    const auto flat = make_flat(4.0);
    EXPECT_THROW(settle(kGeom, flat, -kApronReach - 0.01, 0, 0, 0), std::out_of_range);
    EXPECT_THROW(settle(kGeom, flat, 4.0 + kApronReach + 0.01, 0, 0, 0), std::out_of_range);
    EXPECT_NO_THROW(settle(kGeom, flat, 4.0 + kApronReach, 0, 0, 0));
}

TEST(Settle, PitchesNoseFirstOffCliff) {
    // centre beyond a 1 m drop with both flippers raised: it ends leaning on the lip, nose down
    const auto t = TerrainBuilder(0.0, 1.0).flat_to(3.0).face(-1.0).flat(3.0).build(TerrainKind::composite, {});
    const auto s = settle(kGeom, t, 3.2, kPi / 3, kPi / 3, 0.0);
    EXPECT_LT(s.pitch, -kPi / 3);
    bool lower = false;
    for (const auto& c : s.contacts) lower |= c.point.z < 1e-9;
    EXPECT_TRUE(lower);
}

TEST(DropHeight, MatchesBisectionOracle) {
    auto scenes = random_scenes(300, 99);
    double worst = 0.0;
    for (const auto& sc : scenes) {
        const RobotState s{sc.front, sc.rear, sc.pitch, sc.x, 0.0};
        const double exact = drop_height(kGeom, sc.terrain, s);
        const double approx = oracle::bisection_drop(kGeom, sc.terrain, s);
        worst = std::max(worst, std::abs(exact - approx));
    }
    EXPECT_LT(worst, 2e-5);
}

TEST(DropHeight, MonotoneInTerrainHeight) {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto base = random_terrain(rng);
        std::vector<Vec2> raised(base.vertices().begin(), base.vertices().end());
        const double bump = rng.uniform(0.0, 0.2);
        for (auto& v : raised) v.z += bump * (0.5 + 0.5 * std::sin(3.0 * v.x));
        raised.front().z = raised[1].z;
        raised.back().z = raised[raised.size() - 2].z;
        const TerrainProfile higher(TerrainKind::composite, raised, {});
        // pointwise higher everywhere, aprons included
        const RobotState s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.4, 0.4),
                           rng.uniform(base.x_min(), base.x_max()), 0.0};
        EXPECT_GE(drop_height(kGeom, higher, s), drop_height(kGeom, base, s) - 1e-12);
    }
}

TEST(Contacts, EnvelopeClearanceAgreesWithSampledOracle) {
    auto scenes = random_scenes(100, 17);
    Rng rng(1);
    for (const auto& sc : scenes) {
        const RobotState s{sc.front, sc.rear, sc.pitch, sc.x, drop_height(kGeom, sc.terrain, {sc.front, sc.rear, sc.pitch, sc.x, 0.0}) + rng.uniform(-0.05, 0.3)};
        const double mine = envelope_clearance(kGeom, sc.terrain, s);
        const double ref = oracle::sampled_clearance(kGeom, sc.terrain, s, 2000);
        if (ref >= 0.0) {
            EXPECT_NEAR(mine, ref, 1e-5);
        } else {
            EXPECT_LT(mine, 0.0);
        }
    }
}

TEST(Contacts, VertexSlopeRule) {
    const auto t = step_at(2.0, 0.15);
    // tip circle resting on the lip vertex from above
    RobotState s{0.0, 0.0, 0.0, 2.0 - 0.5 * kGeom.chassis_length - 0.3, 0.25};
    s.z = drop_height(kGeom, t, s);
    const auto cs = find_contacts(kGeom, t, s, 1e-6);
    ASSERT_FALSE(cs.empty());
    for (const auto& c : cs) {
        if (c.feature == TerrainFeature::vertex) {
            EXPECT_DOUBLE_EQ(c.effective_slope, 0.0);
        }
    }
}

TEST(Advance, FlatGroundNeverBlocks) {
    const auto flat = make_flat(6.0);
    RobotState s{0.0, 0.0, 0.0, 1.0, 0.0};
    for (int i = 0; i < 20; ++i) {
        const auto r = advance(kGeom, flat, s, 0.12);
        EXPECT_FALSE(r.blocked);
        EXPECT_NEAR(r.state.x, s.x + 0.12, 1e-12);
        EXPECT_NEAR(r.state.z, kGeom.radius, 1e-12);
        EXPECT_NEAR(r.state.pitch, 0.0, 1e-12);
        s = r.state;
    }
}

TEST(Advance, FlatGroundFixpointWithRaisedFlippers) {
    const auto flat = make_flat(8.0);
    Rng rng(8);
    for (int k = 0; k < 20; ++k) {
        RobotState s{rng.uniform(0, kPi / 3), rng.uniform(0, kPi / 3), 0.0, 1.0, 0.0};
        const auto first = settle(kGeom, flat, s.x, s.front_flipper, s.rear_flipper, 0.0);
        s.z = first.z;
        s.pitch = first.pitch;
        for (int i = 0; i < 10; ++i) {
            const auto r = advance(kGeom, flat, s, 0.12);
            ASSERT_FALSE(r.blocked);
            EXPECT_EQ(r.state.pitch, s.pitch);
            EXPECT_EQ(r.state.z, s.z);
            s = r.state;
        }
    }
}

TEST(Advance, NoseAgainstTallFaceBlocks) {
    const auto t = step_at(3.0, 0.4);
    const double reach = 0.5 * kGeom.chassis_length + kGeom.flipper_length + kGeom.radius;
    RobotState s{0.0, 0.0, 0.0, 3.0 - kFaceRun - reach - 0.01, kGeom.radius};
    const auto r = advance(kGeom, t, s, 0.12);
    EXPECT_TRUE(r.blocked);
    EXPECT_DOUBLE_EQ(r.state.x, s.x);
    // the face segment interior is the steep obstruction
    EXPECT_GT(t.segment_slope(1), 89.0 * kPi / 180.0);
    EXPECT_GT(t.segment_slope(1), SimConfig{}.max_traction_slope);
}

TEST(Advance, LipVertexIsClimbable) {
    const auto t = step_at(3.0, 0.15);
    RobotState s{kPi / 12, 0.0, 0.0, 1.6, 0.0};
    bool touched = false;
    for (int i = 0; i < 20; ++i) {
        const auto r = advance(kGeom, t, s, 0.12);
        ASSERT_FALSE(r.blocked) << "step " << i << " x " << s.x;
        for (const auto& c : r.contacts) touched |= c.feature == TerrainFeature::vertex && c.point.z > 0.1;
        s = r.state;
    }
    EXPECT_TRUE(touched);
    EXPECT_GT(s.x, 3.5);
    EXPECT_NEAR(s.z, 0.15 + kGeom.radius, 1e-6);
}

TEST(Advance, DescendingNeverBlocks) {
    const auto t = step_at(3.0, -0.4);
    RobotState s{0.0, 0.0, 0.0, 1.5, 0.0};
    for (int i = 0; i < 25; ++i) {
        const auto r = advance(kGeom, t, s, 0.12);
        ASSERT_FALSE(r.blocked) << i;
        if (r.flipped) break;
        s = r.state;
    }
    EXPECT_GT(s.x, 3.5);
}

TEST(Advance, ClampsAtTerrainEnd) {
    const auto flat = make_flat(4.0);
    const auto r = advance(kGeom, flat, {0.0, 0.0, 0.0, 3.95, 0.1}, 0.12);
    EXPECT_DOUBLE_EQ(r.state.x, 4.0);
    EXPECT_THROW(advance(kGeom, flat, {0, 0, 0, 1.0, 0.1}, 0.0), std::invalid_argument);
}

TEST(Actuate, FlipperStallsAgainstWall) {
    // front tip against the face of a tall step; lowering it would dig into the wall
    const auto t = step_at(3.0, 0.6);
    RobotState s{kPi / 6, 0.0, 0.0, 0.0, 0.0};
    s.x = 3.0 - kFaceRun - 0.38 - kGeom.flipper_length * std::cos(kPi / 6) - kGeom.radius - 0.01;
    const auto st = settle(kGeom, t, s.x, s.front_flipper, s.rear_flipper, 0.0);
    s.z = st.z;
    s.pitch = st.pitch;
    const RobotState free = actuate(kGeom, make_flat(10.0), s, Action(-1, 0));
    EXPECT_DOUBLE_EQ(free.front_flipper, kPi / 12);
    const RobotState raised = actuate(kGeom, t, s, Action(1, 0));
    EXPECT_DOUBLE_EQ(raised.front_flipper, kPi / 4);
    const RobotState stalled = actuate(kGeom, t, s, Action(-1, 0));
    EXPECT_DOUBLE_EQ(stalled.front_flipper, kPi / 6);
}

TEST(SettleInvariants, RandomScenes) {
    const SimConfig cfg;
    const auto t0 = std::chrono::steady_clock::now();
    const auto scenes = random_scenes(10000, 20240601);
    std::vector<SettleResult> first;
    first.reserve(scenes.size());
    int stable = 0;
    int faults = 0;
    for (const auto& sc : scenes) {
        const auto r = settle(kGeom, sc.terrain, sc.x, sc.front, sc.rear, sc.pitch, cfg);
        const RobotState pose{sc.front, sc.rear, r.pitch, sc.x, r.z};
        faults += r.fault;
        ASSERT_GE(envelope_clearance(kGeom, sc.terrain, pose), -cfg.penetration_tol);
        for (const auto& c : r.contacts) {
            ASSERT_GE(c.clearance, -cfg.penetration_tol);
            ASSERT_LE(c.clearance, cfg.contact_tol);
        }
        if (r.stable) {
            ++stable;
            ASSERT_FALSE(r.contacts.empty());
            double lo = 1e9, hi = -1e9;
            for (const auto& c : r.contacts) {
                lo = std::min(lo, c.point.x);
                hi = std::max(hi, c.point.x);
            }
            ASSERT_GE(sc.x, lo - cfg.support_margin);
            ASSERT_LE(sc.x, hi + cfg.support_margin);
            const auto again = settle(kGeom, sc.terrain, sc.x, sc.front, sc.rear, r.pitch, cfg);
            ASSERT_EQ(again.pitch, r.pitch);
            ASSERT_EQ(again.z, r.z);
            ASSERT_TRUE(again.stable);
        }
        first.push_back(r);
    }
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto& sc = scenes[i];
        const auto r = settle(kGeom, sc.terrain, sc.x, sc.front, sc.rear, sc.pitch, cfg);
        ASSERT_TRUE(same_bits(r.z, first[i].z) && same_bits(r.pitch, first[i].pitch)) << i;
        ASSERT_EQ(r.contacts.size(), first[i].contacts.size());
        ASSERT_EQ(r.stable, first[i].stable);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_GT(stable, 9000);
    EXPECT_EQ(faults, 0);
    EXPECT_LT(secs, 60.0);
    RecordProperty("scenes_stable", stable);
}

TEST(SettleInvariants, NonPenetrationAgainstSampledOracle) {
    const auto scenes = random_scenes(300, 4242);
    for (const auto& sc : scenes) {
        const auto r = settle(kGeom, sc.terrain, sc.x, sc.front, sc.rear, sc.pitch);
        const RobotState pose{sc.front, sc.rear, r.pitch, sc.x, r.z};
        EXPECT_GE(oracle::sampled_clearance(kGeom, sc.terrain, pose), -1e-4);
    }
}
