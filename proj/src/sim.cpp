#include "flipper/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace flipper {
namespace {

// End aprons continue horizontally this far past the profile extent.
constexpr double kExtension = 100.0;
// Penetration threshold used by the forward sweep.
constexpr double kSweepTol = 1e-9;
constexpr int kSweepSamples = 8;
constexpr int kSweepBisections = 40;
constexpr int kPitchBisections = 32;

class Ground {
public:
    explicit Ground(const TerrainProfile& profile) {
        const auto v = profile.vertices();
        verts_.reserve(v.size() + 2);
        verts_.push_back({v.front().x - kExtension, v.front().z});
        verts_.insert(verts_.end(), v.begin(), v.end());
        verts_.push_back({v.back().x + kExtension, v.back().z});
        slopes_.resize(verts_.size() - 1);
        for (std::size_t i = 0; i + 1 < verts_.size(); ++i) {
            const Vec2 d = verts_[i + 1] - verts_[i];
            slopes_[i] = std::atan2(d.z, d.x);
        }
    }

    std::size_t segment_count() const { return slopes_.size(); }
    Vec2 vertex(std::size_t i) const { return verts_[i]; }
    Segment segment(std::size_t i) const { return {verts_[i], verts_[i + 1]}; }
    double slope(std::size_t i) const { return slopes_[i]; }

    double vertex_slope(std::size_t i) const {
        const double before = i == 0 ? slopes_.front() : slopes_[i - 1];
        const double after = i >= slopes_.size() ? slopes_.back() : slopes_[i];
        return std::min(before, after);
    }

    std::size_t index_at(double x) const {
        const auto it = std::upper_bound(verts_.begin(), verts_.end(), x,
                                         [](double v, Vec2 p) { return v < p.x; });
        const auto idx = static_cast<std::ptrdiff_t>(it - verts_.begin()) - 1;
        return static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(segment_count()) - 1));
    }

    // Inclusive range of segments overlapping [x0, x1].
    std::pair<std::size_t, std::size_t> range(double x0, double x1) const { return {index_at(x0), index_at(x1)}; }

    double height(double x) const {
        const std::size_t i = index_at(x);
        const Vec2 a = verts_[i];
        const Vec2 b = verts_[i + 1];
        return a.z + (b.z - a.z) * (x - a.x) / (b.x - a.x);
    }

private:
    std::vector<Vec2> verts_;
    std::vector<double> slopes_;
};

// Envelope at z = 0 with the ground segments each capsule can reach.
struct Placed {
    BodyEnvelope env;
    std::array<std::pair<std::size_t, std::size_t>, 3> ranges;
};

Placed place(const RobotGeometry& geometry, const Ground& ground, double x, double front, double rear,
             double pitch) {
    Placed p;
    p.env = body_envelope(geometry, RobotState{front, rear, pitch, x, 0.0});
    for (std::size_t k = 0; k < p.env.size(); ++k) {
        const Capsule& c = p.env[k];
        const double x0 = std::min(c.axis.a.x, c.axis.b.x) - c.radius;
        const double x1 = std::max(c.axis.a.x, c.axis.b.x) + c.radius;
        p.ranges[k] = ground.range(x0, x1);
    }
    return p;
}

Placed place(const RobotGeometry& geometry, const Ground& ground, const RobotState& s) {
    return place(geometry, ground, s.x, s.front_flipper, s.rear_flipper, s.pitch);
}

Segment shifted(const Segment& s, double z) { return {{s.a.x, s.a.z + z}, {s.b.x, s.b.z + z}}; }

// Lowest z offset at which the placed body rests on the ground: the highest tangency among
// circle-on-segment, circle-on-vertex and vertex-under-capsule-side configurations.
double drop_offset(const Placed& p, const Ground& ground) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.env.size(); ++k) {
        const Capsule& c = p.env[k];
        const double r = c.radius;
        Vec2 a = c.axis.a;
        Vec2 b = c.axis.b;
        if (a.x > b.x) std::swap(a, b);
        const Vec2 u = b - a;
        const double len = norm(u);
        const bool has_side = u.x > 1e-12;
        const Vec2 side_normal = has_side ? Vec2{-u.z / len, u.x / len} : Vec2{};
        for (std::size_t s = p.ranges[k].first; s <= p.ranges[k].second; ++s) {
            const Vec2 c0 = ground.vertex(s);
            const Vec2 c1 = ground.vertex(s + 1);
            const Vec2 t = c1 - c0;
            const double tl = norm(t);
            const Vec2 n{-t.z / tl, t.x / tl};
            for (const Vec2 end : {a, b}) {
                const double foot_x = end.x - r * n.x;
                if (foot_x >= c0.x && foot_x <= c1.x) {
                    const double line_z = c0.z + t.z * (foot_x - c0.x) / t.x;
                    best = std::max(best, line_z + r * n.z - end.z);
                }
                for (const Vec2 v : {c0, c1}) {
                    const double dx = end.x - v.x;
                    if (std::abs(dx) <= r) best = std::max(best, v.z + std::sqrt(r * r - dx * dx) - end.z);
                }
            }
            if (has_side) {
                for (const Vec2 v : {c0, c1}) {
                    const Vec2 q = v + side_normal * r;
                    const double f = (q.x - a.x) / u.x;
                    if (f >= 0.0 && f <= 1.0) best = std::max(best, q.z - (a.z + f * u.z));
                }
            }
        }
    }
    if (!std::isfinite(best)) throw SimulationFault("no ground below the robot envelope");
    return best;
}

bool penetrates(const Placed& p, const Ground& ground, double z, double tol) {
    for (std::size_t k = 0; k < p.env.size(); ++k) {
        const Segment axis = shifted(p.env[k].axis, z);
        if (ground.height(axis.a.x) > axis.a.z || ground.height(axis.b.x) > axis.b.z) return true;
        for (std::size_t s = p.ranges[k].first; s <= p.ranges[k].second; ++s) {
            if (segment_distance(axis, ground.segment(s)) < p.env[k].radius - tol) return true;
        }
    }
    return false;
}

// Over every ground segment, not only those under the capsule.
double min_distance_minus_radius(const Placed& p, const Ground& ground, double z) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.env.size(); ++k) {
        const Segment axis = shifted(p.env[k].axis, z);
        for (std::size_t s = 0; s < ground.segment_count(); ++s) {
            best = std::min(best, segment_distance(axis, ground.segment(s)) - p.env[k].radius);
        }
    }
    return best;
}

void add_contact(std::vector<Contact>& out, const Contact& c) {
    for (const Contact& e : out) {
        if (e.on_body == c.on_body && std::abs(e.point.x - c.point.x) < 1e-9 && std::abs(e.point.z - c.point.z) < 1e-9) {
            return;
        }
    }
    out.push_back(c);
}

// Every endpoint-projection pair between capsule axes and ground segments with clearance <= tol.
std::vector<Contact> collect_contacts(const Placed& p, const Ground& ground, double z, double tol) {
    std::vector<Contact> out;
    for (std::size_t k = 0; k < p.env.size(); ++k) {
        const Capsule& cap = p.env[k];
        const Segment axis = shifted(cap.axis, z);
        for (std::size_t s = p.ranges[k].first; s <= p.ranges[k].second; ++s) {
            const Segment seg = ground.segment(s);
            for (const Vec2 end : {axis.a, axis.b}) {
                const Projection pr = project_onto_segment(end, seg);
                const double clearance = pr.distance - cap.radius;
                if (clearance > tol) continue;
                Contact c{pr.point, cap.part, TerrainFeature::segment_interior, ground.slope(s), clearance};
                if (pr.t <= 0.0 || pr.t >= 1.0) {
                    const std::size_t v = pr.t <= 0.0 ? s : s + 1;
                    c.point = ground.vertex(v);
                    c.feature = TerrainFeature::vertex;
                    c.effective_slope = ground.vertex_slope(v);
                }
                add_contact(out, c);
            }
            for (const std::size_t v : {s, s + 1}) {
                const Projection pr = project_onto_segment(ground.vertex(v), axis);
                const double clearance = pr.distance - cap.radius;
                if (clearance > tol) continue;
                add_contact(out, {ground.vertex(v), cap.part, TerrainFeature::vertex, ground.vertex_slope(v), clearance});
            }
        }
    }
    return out;
}

// +1: supported only ahead of the CoM (nose rises), -1: only behind it (nose drops), 0: stable.
int tip_direction(const std::vector<Contact>& contacts, double com_x, double margin) {
    if (contacts.empty()) return -1;
    double lo = contacts.front().point.x;
    double hi = lo;
    for (const Contact& c : contacts) {
        lo = std::min(lo, c.point.x);
        hi = std::max(hi, c.point.x);
    }
    if (com_x < lo - margin) return 1;
    if (com_x > hi + margin) return -1;
    return 0;
}

struct PitchEval {
    double z;
    int direction;
};

SettleResult settle_on(const RobotGeometry& geometry, const Ground& ground, double x, double front, double rear,
                       double pitch_init, const SimConfig& config) {
    const auto eval = [&](double pitch) {
        const Placed p = place(geometry, ground, x, front, rear, pitch);
        const double z = drop_offset(p, ground);
        return PitchEval{z, tip_direction(collect_contacts(p, ground, z, config.search_contact_tol), x,
                                          config.support_margin)};
    };

    SettleResult out;
    double pitch = std::clamp(pitch_init, -config.flip_limit, config.flip_limit);
    PitchEval cur = eval(pitch);
    int iterations = 0;
    while (cur.direction != 0) {
        if (++iterations > config.max_iterations) {
            out.fault = true;
            out.flipped = true;
            break;
        }
        const double next = pitch + cur.direction * config.pivot_step;
        if (std::abs(next) >= config.flip_limit) {
            pitch = std::clamp(next, -config.flip_limit, config.flip_limit);
            cur = eval(pitch);
            out.flipped = true;
            break;
        }
        const PitchEval ne = eval(next);
        if (ne.direction == cur.direction) {
            pitch = next;
            cur = ne;
            continue;
        }
        // Support changed inside this step: bisect for the first pitch where it does.
        double lo = pitch;
        double hi = next;
        for (int i = 0; i < kPitchBisections; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid).direction == cur.direction) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        pitch = hi;
        cur = eval(hi);
    }

    const Placed p = place(geometry, ground, x, front, rear, pitch);
    out.pitch = pitch;
    out.z = cur.z;
    out.contacts = collect_contacts(p, ground, cur.z, config.contact_tol);
    out.stable = !out.flipped && tip_direction(out.contacts, x, config.support_margin) == 0;
    return out;
}

void check_extent(const TerrainProfile& terrain, double x) {
    if (!(x >= terrain.x_min() - kApronReach && x <= terrain.x_max() + kApronReach)) {
        throw std::out_of_range("robot position outside terrain extent");
    }
}

// Whether driving forward by step from the settled pose meets a contact too steep to climb.
bool motion_obstructed(const RobotGeometry& geometry, const Ground& ground, const RobotState& s, double step,
                       const SimConfig& config) {
    const auto pose_at = [&](double f) {
        return place(geometry, ground, s.x + f * step, s.front_flipper, s.rear_flipper, s.pitch);
    };
    double lo = 0.0;
    double hi = -1.0;
    for (int i = 1; i <= kSweepSamples; ++i) {
        const double f = static_cast<double>(i) / kSweepSamples;
        if (penetrates(pose_at(f), ground, s.z, kSweepTol)) {
            hi = f;
            break;
        }
        lo = f;
    }
    if (hi < 0.0) return false;
    for (int i = 0; i < kSweepBisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (penetrates(pose_at(mid), ground, s.z, kSweepTol)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const auto obstructing = collect_contacts(pose_at(hi), ground, s.z, -0.5 * kSweepTol);
    return std::any_of(obstructing.begin(), obstructing.end(), [&](const Contact& c) {
        return c.effective_slope > config.max_traction_slope;
    });
}

// A flipper swept into a wall: the capsule reaches into a steep segment well below its top.
bool lateral_wall_hit(const Capsule& cap, const Ground& ground, std::pair<std::size_t, std::size_t> range,
                      const SimConfig& config) {
    for (std::size_t s = range.first; s <= range.second; ++s) {
        if (std::abs(ground.slope(s)) <= config.max_traction_slope) continue;
        const Segment seg = ground.segment(s);
        const double top = std::max(seg.a.z, seg.b.z);
        if (segments_intersect(cap.axis, seg)) {
            // Lowest point of the axis inside the face's x-span approximates the crossing.
            const Vec2 d = cap.axis.b - cap.axis.a;
            double cross_z = top;
            if (std::abs(d.x) > 1e-12) {
                const double f = std::clamp((0.5 * (seg.a.x + seg.b.x) - cap.axis.a.x) / d.x, 0.0, 1.0);
                cross_z = cap.axis.a.z + f * d.z;
            } else {
                cross_z = std::min(cap.axis.a.z, cap.axis.b.z);
            }
            if (cross_z < top - 0.5 * cap.radius) return true;
            continue;
        }
        const std::array<std::pair<Vec2, Segment>, 2> ends{{{cap.axis.a, seg}, {cap.axis.b, seg}}};
        for (const auto& [pt, sg] : ends) {
            const Projection pr = project_onto_segment(pt, sg);
            if (pr.distance < cap.radius - config.penetration_tol && pr.t > 0.0 && pr.t < 1.0 &&
                pr.point.z < top - 0.5 * cap.radius) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

SettleResult settle(const RobotGeometry& geometry, const TerrainProfile& terrain, double x, double front_flipper,
                    double rear_flipper, double pitch_init, const SimConfig& config) {
    check_extent(terrain, x);
    const Ground ground(terrain);
    return settle_on(geometry, ground, x, front_flipper, rear_flipper, pitch_init, config);
}

AdvanceResult advance(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state,
                      double dx, const SimConfig& config) {
    if (!(dx > 0.0)) throw std::invalid_argument("advance distance must be positive");
    check_extent(terrain, state.x);
    const Ground ground(terrain);

    const SettleResult here =
        settle_on(geometry, ground, state.x, state.front_flipper, state.rear_flipper, state.pitch, config);
    RobotState current = state;
    current.z = here.z;
    current.pitch = here.pitch;
    AdvanceResult out{current, false, here.contacts, here.flipped};
    if (here.flipped) return out;

    const double step = std::min(dx, terrain.x_max() - state.x);
    if (step <= 1e-12 || motion_obstructed(geometry, ground, current, step, config)) {
        out.blocked = true;
        return out;
    }

    const SettleResult next = settle_on(geometry, ground, state.x + step, state.front_flipper,
                                        state.rear_flipper, here.pitch, config);
    if (!next.flipped && !next.contacts.empty()) {
        const auto front = std::max_element(next.contacts.begin(), next.contacts.end(),
                                            [](const Contact& a, const Contact& b) { return a.point.x < b.point.x; });
        if (front->effective_slope > config.max_traction_slope) {
            out.blocked = true;
            return out;
        }
    }
    out.state.x = state.x + step;
    out.state.z = next.z;
    out.state.pitch = next.pitch;
    out.contacts = next.contacts;
    out.flipped = next.flipped;
    return out;
}

RobotState actuate(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state,
                   Action action, const SimConfig& config) {
    const Ground ground(terrain);
    const RobotState target = apply_action(state, action);
    RobotState out = state;

    const auto try_flipper = [&](double RobotState::*angle, std::size_t capsule) {
        if (target.*angle == out.*angle) return;
        RobotState candidate = out;
        candidate.*angle = target.*angle;
        const Placed p = place(geometry, ground, candidate);
        const Capsule moved{shifted(p.env[capsule].axis, out.z), p.env[capsule].radius, p.env[capsule].part};
        if (!lateral_wall_hit(moved, ground, p.ranges[capsule], config)) out = candidate;
    };
    try_flipper(&RobotState::front_flipper, 1);
    try_flipper(&RobotState::rear_flipper, 2);
    return out;
}

double envelope_clearance(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state) {
    const Ground ground(terrain);
    const Placed p = place(geometry, ground, state);
    if (penetrates(p, ground, state.z, 0.0)) return std::min(0.0, state.z - drop_offset(p, ground));
    return min_distance_minus_radius(p, ground, state.z);
}

std::vector<Contact> find_contacts(const RobotGeometry& geometry, const TerrainProfile& terrain,
                                   const RobotState& state, double tol) {
    const Ground ground(terrain);
    return collect_contacts(place(geometry, ground, state), ground, state.z, tol);
}

double drop_height(const RobotGeometry& geometry, const TerrainProfile& terrain, const RobotState& state) {
    const Ground ground(terrain);
    return drop_offset(place(geometry, ground, state), ground);
}

double point_clearance(const TerrainProfile& terrain, Vec2 p, double radius) {
    const Ground ground(terrain);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < ground.segment_count(); ++s) {
        best = std::min(best, project_onto_segment(p, ground.segment(s)).distance);
    }
    const double sign = ground.height(p.x) > p.z ? -1.0 : 1.0;
    return sign * best - radius;
}

}  // namespace flipper
