#pragma once

#include <numbers>
#include <stdexcept>
#include <vector>

#include "flipper/robot.hpp"
#include "flipper/terrain.hpp"

namespace flipper {

inline constexpr double kDegree = std::numbers::pi / 180.0;

struct SimConfig {
    // Steepest effective slope the tracks can climb at the frontmost contact.
    double max_traction_slope = 55.0 * kDegree;
    double penetration_tol = 1e-4;
    double contact_tol = 1e-3;
    double support_margin = 1e-3;
    double pivot_step = 0.5 * kDegree;
    int max_iterations = 720;
    double flip_limit = 80.0 * kDegree;
    // Contact tolerance used while searching for the resting pitch.
    double search_contact_tol = 1e-10;
};

enum class TerrainFeature { segment_interior, vertex };

struct Contact {
    Vec2 point;  // on the terrain
    BodyPart on_body = BodyPart::chassis;
    TerrainFeature feature = TerrainFeature::segment_interior;
    double effective_slope = 0.0;
    double clearance = 0.0;
};

struct SettleResult {
    double z = 0.0;
    double pitch = 0.0;
    std::vector<Contact> contacts;
    bool stable = false;
    bool flipped = false;
    // Pitch search exceeded max_iterations; reported and treated as flipped.
    bool fault = false;
};

class SimulationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quasi-static resting pose of the robot with its centre at x. The terrain's end aprons are
// treated as continuing horizontally so the envelope may overhang the profile extent.
// Throws std::out_of_range when x lies more than kApronReach beyond [x_min, x_max].
SettleResult settle(const RobotGeometry& geometry, const TerrainProfile& terrain, double x,
                    double front_flipper, double rear_flipper, double pitch_init,
                    const SimConfig& config = {});

struct AdvanceResult {
    RobotState state;
    bool blocked = false;
    std::vector<Contact> contacts;
    bool flipped = false;
};

// Drives forward by dx (clamped at the terrain end) and settles. Progress is rejected when a
// contact obstructing the motion is steeper than max_traction_slope.
AdvanceResult advance(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state,
                      double dx, const SimConfig& config = {});

// Applies the flipper increments, front then rear. An increment that would sweep the flipper into
// a face steeper than max_traction_slope, well below the face top, stalls at the previous angle.
RobotState actuate(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state,
                   Action action, const SimConfig& config = {});

// Signed clearance of the whole envelope: min distance to the ground minus radius, negative
// when penetrating.
double envelope_clearance(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state);

// Contacts of the envelope at the given pose within tol of the ground.
std::vector<Contact> find_contacts(const RobotGeometry& geometry, const TerrainProfile& terrain,
                                   const RobotState& state, double tol);

// Lowest non-penetrating height at fixed pitch and flipper angles (no tipping). Exact: the highest
// tangency between the capsules and the ground polyline.
double drop_height(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state);

// Clearance of a point (e.g. a chassis end centre) minus radius; negative below ground.
double point_clearance(const TerrainProfile& terrain, Vec2 p, double radius);

}  // namespace flipper
