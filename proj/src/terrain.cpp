#include "flipper/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flipper/rng.hpp"

namespace flipper {

std::string_view to_string(TerrainKind kind) {
    switch (kind) {
        case TerrainKind::flat: return "flat";
        case TerrainKind::single_step: return "single_step";
        case TerrainKind::stairs: return "stairs";
        case TerrainKind::composite: return "composite";
    }
    return "composite";
}

TerrainKind terrain_kind_from_string(std::string_view name) {
    if (name == "flat") return TerrainKind::flat;
    if (name == "single_step") return TerrainKind::single_step;
    if (name == "stairs") return TerrainKind::stairs;
    if (name == "composite") return TerrainKind::composite;
    throw std::invalid_argument("unknown terrain kind: " + std::string(name));
}

TerrainProfile::TerrainProfile(TerrainKind kind, std::vector<Vec2> vertices, TerrainMetadata metadata)
    : kind_(kind), vertices_(std::move(vertices)), metadata_(std::move(metadata)) {
    if (vertices_.size() < 2) throw std::invalid_argument("terrain needs at least two vertices");
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        if (!(vertices_[i].x > vertices_[i - 1].x)) {
            throw std::invalid_argument("terrain vertices must have strictly increasing x");
        }
    }
    const auto horizontal = [](Vec2 a, Vec2 b) { return std::abs(a.z - b.z) < 1e-12; };
    if (!horizontal(vertices_[0], vertices_[1]) ||
        !horizontal(vertices_[vertices_.size() - 2], vertices_.back())) {
        throw std::invalid_argument("terrain must begin and end with horizontal aprons");
    }
    if (kind_ == TerrainKind::stairs &&
        std::abs(metadata_.slope - std::atan(metadata_.rise / metadata_.run)) > 1e-6) {
        throw std::invalid_argument("stairs slope metadata disagrees with rise/run");
    }
    const auto [lo, hi] = std::minmax_element(vertices_.begin(), vertices_.end(),
                                              [](Vec2 a, Vec2 b) { return a.z < b.z; });
    z_min_ = lo->z;
    z_max_ = hi->z;
}

std::size_t TerrainProfile::segment_index(double x) const {
    const auto it = std::upper_bound(vertices_.begin(), vertices_.end(), x,
                                     [](double v, Vec2 p) { return v < p.x; });
    const auto idx = static_cast<std::ptrdiff_t>(it - vertices_.begin()) - 1;
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(segment_count()) - 1));
}

double TerrainProfile::height_clamped(double x) const {
    if (x <= x_min()) return vertices_.front().z;
    if (x >= x_max()) return vertices_.back().z;
    const std::size_t i = segment_index(x);
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[i + 1];
    if (x == a.x) return a.z;
    return a.z + (b.z - a.z) * (x - a.x) / (b.x - a.x);
}

double TerrainProfile::height_at(double x) const {
    if (!(x >= x_min() && x <= x_max())) {
        throw std::out_of_range("height query outside terrain extent");
    }
    return height_clamped(x);
}

double TerrainProfile::segment_slope(std::size_t i) const {
    const Vec2 d = vertices_[i + 1] - vertices_[i];
    return std::atan2(d.z, d.x);
}

double TerrainProfile::vertex_slope(std::size_t i) const {
    const double before = i == 0 ? 0.0 : segment_slope(i - 1);
    const double after = i + 1 >= vertices_.size() ? 0.0 : segment_slope(i);
    return std::min(before, after);
}

nlohmann::json TerrainProfile::to_json() const {
    nlohmann::json verts = nlohmann::json::array();
    for (const Vec2& v : vertices_) verts.push_back({v.x, v.z});
    return {
        {"kind", std::string(to_string(kind_))},
        {"metadata",
         {{"step_height", metadata_.step_height},
          {"run", metadata_.run},
          {"rise", metadata_.rise},
          {"count", metadata_.count},
          {"slope", metadata_.slope},
          {"direction", metadata_.direction},
          {"name", metadata_.name},
          {"origin_x", metadata_.origin_x},
          {"start_x", metadata_.start_x},
          {"goal_x", metadata_.goal_x}}},
        {"vertices", verts},
    };
}

TerrainProfile TerrainProfile::from_json(const nlohmann::json& j) {
    TerrainMetadata m;
    const auto& md = j.at("metadata");
    m.step_height = md.value("step_height", 0.0);
    m.run = md.value("run", 0.0);
    m.rise = md.value("rise", 0.0);
    m.count = md.value("count", 0);
    m.slope = md.value("slope", 0.0);
    m.direction = md.value("direction", std::string{});
    m.name = md.value("name", std::string{});
    m.origin_x = md.value("origin_x", 0.0);
    m.start_x = md.value("start_x", 0.0);
    m.goal_x = md.value("goal_x", 0.0);
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return TerrainProfile(terrain_kind_from_string(j.at("kind").get<std::string>()), std::move(verts),
                          std::move(m));
}

bool TerrainProfile::operator==(const TerrainProfile& o) const {
    return kind_ == o.kind_ && vertices_ == o.vertices_ && to_json() == o.to_json();
}

TerrainBuilder::TerrainBuilder(double x0, double z0) { vertices_.push_back({x0, z0}); }

TerrainBuilder& TerrainBuilder::flat_to(double x) {
    if (!(x > cursor_x())) throw std::invalid_argument("flat_to must move forward");
    vertices_.push_back({x, cursor_z()});
    return *this;
}

TerrainBuilder& TerrainBuilder::face(double dz) { return face_to(cursor_z() + dz); }

TerrainBuilder& TerrainBuilder::face_to(double z) {
    const Vec2 top = vertices_.back();
    const double dz = z - top.z;
    if (dz > 0.0) {
        // Upper vertex sits at the nominal x, the foot kFaceRun before it.
        if (vertices_.size() < 2 || vertices_[vertices_.size() - 2].x >= top.x - kFaceRun) {
            throw std::invalid_argument("up face needs a preceding run longer than the face run");
        }
        vertices_.back().x = top.x - kFaceRun;
        vertices_.push_back({top.x, z});
    } else if (dz < 0.0) {
        vertices_.push_back({top.x + kFaceRun, z});
    }
    return *this;
}

TerrainProfile TerrainBuilder::build(TerrainKind kind, TerrainMetadata metadata) const {
    return TerrainProfile(kind, vertices_, std::move(metadata));
}

TerrainProfile make_flat(double length, double z) {
    TerrainMetadata m;
    m.name = "flat";
    m.start_x = 0.0;
    m.goal_x = length;
    return TerrainBuilder(0.0, z).flat_to(length).build(TerrainKind::flat, m);
}

TerrainProfile generate_step(double height, double run_length, std::uint64_t seed) {
    if (!(std::abs(height) >= 0.05 && std::abs(height) <= 0.4)) {
        throw std::invalid_argument("step height magnitude must lie in [0.05, 0.4] m");
    }
    if (!(run_length > kFaceRun)) throw std::invalid_argument("step run length must be positive");
    Rng rng(seed);
    const double face_x = kStartSetback + rng.uniform(0.0, kApronJitter);

    TerrainMetadata m;
    m.step_height = height;
    m.run = run_length;
    m.name = "step";
    m.start_x = 0.0;
    m.goal_x = std::min(face_x + kApronLength, face_x + run_length);
    return TerrainBuilder(0.0, 0.0)
        .flat_to(face_x)
        .face(height)
        .flat_to(face_x + run_length)
        .build(TerrainKind::single_step, m);
}

TerrainProfile generate_stairs(double rise, double run, int count, StairDirection direction,
                               std::uint64_t seed) {
    if (!(rise > 0.0) || !(run > 2 * kFaceRun)) {
        throw std::invalid_argument("stair rise and run must be positive");
    }
    if (count < 3 || count > 8) throw std::invalid_argument("stair count must lie in [3, 8]");
    Rng rng(seed);
    const double first_x = kStartSetback + rng.uniform(0.0, kApronJitter);
    const double sign = direction == StairDirection::up ? 1.0 : -1.0;
    const double z0 = direction == StairDirection::up ? 0.0 : rise * count;

    TerrainBuilder b(0.0, z0);
    b.flat_to(first_x);
    for (int k = 0; k < count; ++k) {
        if (k > 0) b.flat_to(first_x + k * run);
        b.face_to(z0 + sign * rise * (k + 1));
    }
    const double last_x = first_x + (count - 1) * run;
    b.flat_to(last_x + kRunOut);

    TerrainMetadata m;
    m.rise = rise;
    m.run = run;
    m.count = count;
    m.slope = std::atan(rise / run);
    m.direction = direction == StairDirection::up ? "up" : "down";
    m.name = "stairs";
    m.origin_x = first_x - run;
    m.start_x = 0.0;
    m.goal_x = last_x + kApronLength;
    return b.build(TerrainKind::stairs, m);
}

std::string_view to_string(EvalCourse course) {
    return course == EvalCourse::single_step_04 ? "single_step_04" : "steep_stair";
}

EvalCourse eval_course_from_string(std::string_view name) {
    if (name == "single_step_04") return EvalCourse::single_step_04;
    if (name == "steep_stair") return EvalCourse::steep_stair;
    throw std::invalid_argument("unknown eval course: " + std::string(name));
}

TerrainProfile generate_eval_course(EvalCourse course) {
    TerrainMetadata m;
    m.name = std::string(to_string(course));
    // Both courses put their first feature 1 m into the profile.
    m.start_x = 1.0 - kStartSetback;
    if (course == EvalCourse::single_step_04) {
        // 1 m apron, 0.4 m up, 3 m plateau, 0.4 m down, 1 m apron.
        m.step_height = 0.4;
        m.run = 3.0;
        m.count = 1;
        m.goal_x = 5.0;
        return TerrainBuilder(0.0, 0.0)
            .flat_to(1.0)
            .face(0.4)
            .flat_to(4.0)
            .face(-0.4)
            .flat_to(5.0)
            .build(TerrainKind::composite, m);
    }
    // 6 x (0.2 rise, 0.3 run) up, platform, 6 x (0.2 rise, 0.2 run) down, 6.5 m overall.
    TerrainBuilder b(0.0, 0.0);
    b.flat_to(1.0);
    for (int k = 0; k < 6; ++k) {
        if (k > 0) b.flat_to(1.0 + 0.3 * k);
        b.face_to(0.2 * (k + 1));
    }
    for (int k = 0; k < 6; ++k) {
        b.flat_to(4.5 + 0.2 * k);
        b.face_to(0.2 * (5 - k));
    }
    b.flat_to(6.5);
    m.rise = 0.2;
    m.count = 6;
    m.goal_x = 6.5;
    return b.build(TerrainKind::composite, m);
}

HeightObservation sample_height_observation(const TerrainProfile& profile, Vec2 robot_pose, int n,
                                            double d, double noise_sigma, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("observation needs at least one bin");
    if (!(d > 0.0)) throw std::invalid_argument("bin width must be positive");
    HeightObservation obs;
    obs.n = n;
    obs.d = d;
    obs.bins.resize(static_cast<std::size_t>(n));

    const auto verts = profile.vertices();
    const double half = 0.5 * n;
    const double h = d / kSamplesPerBin;
    // Samples increase monotonically in x, so walk the segment index instead of searching.
    std::size_t seg = profile.segment_index(robot_pose.x - half * d);
    for (int i = 0; i < n; ++i) {
        const double lo = robot_pose.x + (i - half) * d;
        double sum = 0.0;
        for (int s = 0; s < kSamplesPerBin; ++s) {
            const double x = lo + (s + 0.5) * h;
            double z;
            if (x <= profile.x_min()) {
                z = verts.front().z;
            } else if (x >= profile.x_max()) {
                z = verts.back().z;
            } else {
                while (seg + 1 < profile.segment_count() && verts[seg + 1].x <= x) ++seg;
                const Vec2 a = verts[seg];
                const Vec2 b = verts[seg + 1];
                z = a.z + (b.z - a.z) * (x - a.x) / (b.x - a.x);
            }
            sum += z;
        }
        obs.bins[static_cast<std::size_t>(i)] = sum / kSamplesPerBin - robot_pose.z;
    }
    if (noise_sigma > 0.0) {
        Rng rng(seed);
        for (double& b : obs.bins) b += rng.normal(noise_sigma);
    }
    return obs;
}

}  // namespace flipper
