#pragma once

#include <cmath>

namespace flipper {

// Planar point/vector in the sagittal (x forward, z up) plane.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, z + o.z}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, z - o.z}; }
    constexpr Vec2 operator*(double s) const { return {x * s, z * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.z - a.z * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.z); }

inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.z, s * v.x + c * v.z};
}

struct Segment {
    Vec2 a;
    Vec2 b;
};

// Closest point on segment s to p, with its parameter t in [0, 1].
struct Projection {
    Vec2 point;
    double t = 0.0;
    double distance = 0.0;
};

Projection project_onto_segment(Vec2 p, const Segment& s);

// True when the closed segments share at least one point.
bool segments_intersect(const Segment& s, const Segment& q);

// Euclidean distance between two closed segments (0 when they intersect).
double segment_distance(const Segment& s, const Segment& q);

}  // namespace flipper
