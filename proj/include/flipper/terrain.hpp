#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flipper/geometry.hpp"
#include "json.hpp"

namespace flipper {

enum class TerrainKind { flat, single_step, stairs, composite };

std::string_view to_string(TerrainKind kind);
TerrainKind terrain_kind_from_string(std::string_view name);

enum class StairDirection { up, down };

// Horizontal run given to every step face so that x stays strictly increasing.
inline constexpr double kFaceRun = 1e-3;
// Distance from the last feature to the goal.
inline constexpr double kApronLength = 1.0;
// Robot start centre to the first feature: the level-flipper envelope reach of the default robot
// (1.016 m) plus a decision step of free approach.
inline constexpr double kStartSetback = 1.14;
// Robot centres may sit this far beyond the profile ends, over the horizontally continued aprons.
inline constexpr double kApronReach = 2.0;
// Seeded generators shift the first feature by up to this much (one decision-step advance).
inline constexpr double kApronJitter = 0.12;
// Platform length after the last feature of generated single features.
inline constexpr double kRunOut = 1.5;

// Generation parameters echoed into terrain files. Unused fields stay at zero.
struct TerrainMetadata {
    double step_height = 0.0;
    double run = 0.0;
    double rise = 0.0;
    int count = 0;
    double slope = 0.0;
    std::string direction;
    std::string name;
    double origin_x = 0.0;
    double start_x = 0.0;
    double goal_x = 0.0;
};

// Piecewise-linear ground as an x-monotone polyline. Immutable once built; the solid lies below.
class TerrainProfile {
public:
    TerrainProfile(TerrainKind kind, std::vector<Vec2> vertices, TerrainMetadata metadata);

    TerrainKind kind() const { return kind_; }
    const TerrainMetadata& metadata() const { return metadata_; }
    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t segment_count() const { return vertices_.size() - 1; }
    Segment segment(std::size_t i) const { return {vertices_[i], vertices_[i + 1]}; }

    double x_min() const { return vertices_.front().x; }
    double x_max() const { return vertices_.back().x; }
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }

    // Linear interpolation; throws std::out_of_range outside [x_min, x_max].
    double height_at(double x) const;
    // Same, but the end aprons continue horizontally beyond the extent.
    double height_clamped(double x) const;

    // Index of the segment containing x (clamped to the valid range).
    std::size_t segment_index(double x) const;

    double segment_slope(std::size_t i) const;
    // Min of the adjacent segment slopes; the end aprons continue with slope 0.
    double vertex_slope(std::size_t i) const;

    nlohmann::json to_json() const;
    static TerrainProfile from_json(const nlohmann::json& j);

    bool operator==(const TerrainProfile& o) const;

private:
    TerrainKind kind_;
    std::vector<Vec2> vertices_;
    TerrainMetadata metadata_;
    double z_min_ = 0.0;
    double z_max_ = 0.0;
};

// Incremental polyline construction with the face convention used by every generator: a face at
// nominal x places its upper vertex at x, so height_at(x) returns the upper level.
class TerrainBuilder {
public:
    explicit TerrainBuilder(double x0 = 0.0, double z0 = 0.0);

    TerrainBuilder& flat_to(double x);
    TerrainBuilder& flat(double length) { return flat_to(cursor_x() + length); }
    // Step face of signed height dz at the current cursor.
    TerrainBuilder& face(double dz);
    // Face up or down to level z exactly.
    TerrainBuilder& face_to(double z);

    double cursor_x() const { return vertices_.back().x; }
    double cursor_z() const { return vertices_.back().z; }

    TerrainProfile build(TerrainKind kind, TerrainMetadata metadata) const;

private:
    std::vector<Vec2> vertices_;
};

TerrainProfile make_flat(double length, double z = 0.0);

// Single step of signed height; |height| in [0.05, 0.4], throws std::invalid_argument otherwise.
TerrainProfile generate_step(double height, double run_length, std::uint64_t seed);

// count equal steps with a platform at the top; rise, run > 0 and count in [3, 8].
TerrainProfile generate_stairs(double rise, double run, int count, StairDirection direction,
                               std::uint64_t seed);

enum class EvalCourse { single_step_04, steep_stair };
std::string_view to_string(EvalCourse course);
EvalCourse eval_course_from_string(std::string_view name);

TerrainProfile generate_eval_course(EvalCourse course);

struct HeightObservation {
    std::vector<double> bins;
    int n = 0;
    double d = 0.0;
};

// Dense samples per bin when averaging terrain heights.
inline constexpr int kSamplesPerBin = 512;

// Mean terrain height relative to the robot over n bins of width d centred on robot_pose.x.
HeightObservation sample_height_observation(const TerrainProfile& profile, Vec2 robot_pose, int n,
                                            double d, double noise_sigma, std::uint64_t seed);

}  // namespace flipper
