#include "flipper/svg.hpp"

#include <algorithm>
#include <sstream>

namespace flipper {

std::string render_svg(const TerrainProfile& terrain, const RobotGeometry& geometry,
                       const std::vector<TrajectoryRecord>& records, int stride) {
    constexpr double kScale = 200.0;  // px per m
    constexpr double kMargin = 1.2;   // m around the profile
    const double x0 = terrain.x_min() - kMargin;
    const double x1 = terrain.x_max() + kMargin;
    double z_top = terrain.z_max() + kMargin;
    for (const auto& r : records) z_top = std::max(z_top, r.z + kMargin);
    const double z_bottom = terrain.z_min() - 0.3;
    const auto px = [&](double x) { return (x - x0) * kScale; };
    const auto pz = [&](double z) { return (z_top - z) * kScale; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(x1) << "\" height=\"" << pz(z_bottom) << "\">\n";
    os << "<polygon fill=\"#c8b89a\" stroke=\"#5a4a30\" points=\"" << px(x0) << ',' << pz(z_bottom) << ' ' << px(x0) << ','
       << pz(terrain.vertices().front().z);
    for (const Vec2 v : terrain.vertices()) os << ' ' << px(v.x) << ',' << pz(v.z);
    os << ' ' << px(x1) << ',' << pz(terrain.vertices().back().z) << ' ' << px(x1) << ',' << pz(z_bottom) << "\"/>\n";

    const int step = std::max(1, stride);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i % static_cast<std::size_t>(step) != 0 && i + 1 != records.size()) continue;
        const auto& r = records[i];
        const RobotState s{r.theta_f1, r.theta_f2, r.theta_R, r.x, r.z};
        const double opacity = i + 1 == records.size() ? 0.9 : 0.25;
        for (const Capsule& c : body_envelope(geometry, s)) {
            const char* colour = c.part == BodyPart::chassis ? "#2a4d8f" : "#d9822b";
            os << "<line x1=\"" << px(c.axis.a.x) << "\" y1=\"" << pz(c.axis.a.z) << "\" x2=\"" << px(c.axis.b.x)
               << "\" y2=\"" << pz(c.axis.b.z) << "\" stroke=\"" << colour << "\" stroke-opacity=\"" << opacity
               << "\" stroke-width=\"" << 2 * c.radius * kScale << "\" stroke-linecap=\"round\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace flipper
