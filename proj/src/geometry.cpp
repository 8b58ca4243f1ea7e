#include "flipper/geometry.hpp"

#include <algorithm>

namespace flipper {

Projection project_onto_segment(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = dot(d, d);
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    }
    const Vec2 q = s.a + d * t;
    return {q, t, norm(p - q)};
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.z, b.z) <= p.z &&
           p.z <= std::max(a.z, b.z);
}

}  // namespace

bool segments_intersect(const Segment& s, const Segment& q) {
    const int o1 = orientation(s.a, s.b, q.a);
    const int o2 = orientation(s.a, s.b, q.b);
    const int o3 = orientation(q.a, q.b, s.a);
    const int o4 = orientation(q.a, q.b, s.b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(s.a, s.b, q.a)) return true;
    if (o2 == 0 && on_segment(s.a, s.b, q.b)) return true;
    if (o3 == 0 && on_segment(q.a, q.b, s.a)) return true;
    if (o4 == 0 && on_segment(q.a, q.b, s.b)) return true;
    return false;
}

double segment_distance(const Segment& s, const Segment& q) {
    if (segments_intersect(s, q)) return 0.0;
    return std::min({project_onto_segment(s.a, q).distance, project_onto_segment(s.b, q).distance,
                     project_onto_segment(q.a, s).distance, project_onto_segment(q.b, s).distance});
}

}  // namespace flipper
