#pragma once

// Random settle scenes shared by the sim suite and the acceptance runner.

#include <cstring>
#include <numbers>
#include <vector>

#include "flipper/rng.hpp"
#include "flipper/terrain.hpp"

namespace scenes {

using namespace flipper;

inline TerrainProfile random_terrain(Rng& rng) {
    switch (rng.below(5)) {
        case 0: {
            const double h = rng.uniform(0.05, 0.4) * (rng.below(2) ? 1.0 : -1.0);
            return generate_step(h, rng.uniform(0.5, 3.0), rng.engine()());
        }
        case 1:
            return generate_stairs(rng.uniform(0.05, 0.3), rng.uniform(0.15, 0.5), 3 + static_cast<int>(rng.below(6)),
                                   rng.below(2) ? StairDirection::up : StairDirection::down, rng.engine()());
        case 2: return generate_eval_course(EvalCourse::single_step_04);
        case 3: return generate_eval_course(EvalCourse::steep_stair);
        default: {
            // ragged ground with slopes and faces of both signs
            TerrainBuilder b(0.0, 0.0);
            b.flat(1.0);
            for (int k = 0; k < 6; ++k) {
                if (rng.below(2)) b.face(rng.uniform(-0.3, 0.3));
                b.flat(rng.uniform(0.1, 0.6));
            }
            std::vector<Vec2> v;
            const auto built = b.build(TerrainKind::composite, {});
            for (auto p : built.vertices()) v.push_back(p);
            // tilt interior vertices into ramps
            for (std::size_t i = 2; i + 2 < v.size(); ++i) v[i].z += rng.uniform(-0.05, 0.05);
            v.push_back({v.back().x + 1.0, v.back().z});
            return TerrainProfile(TerrainKind::composite, v, {});
        }
    }
}

struct Scene {
    TerrainProfile terrain;
    double x, front, rear, pitch;
};

inline std::vector<Scene> random_scenes(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Scene> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TerrainProfile t = random_terrain(rng);
        const double x = rng.uniform(t.x_min(), t.x_max());
        const double f = rng.uniform(-std::numbers::pi / 3, std::numbers::pi / 3);
        const double r = rng.uniform(-std::numbers::pi / 3, std::numbers::pi / 3);
        const double p = rng.uniform(-0.4, 0.4);
        out.push_back({std::move(t), x, f, r, p});
    }
    return out;
}

inline bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace scenes
