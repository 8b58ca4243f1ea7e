#pragma once

#include <string>
#include <vector>

#include "flipper/robot.hpp"
#include "flipper/terrain.hpp"
#include "flipper/trajectory.hpp"

namespace flipper {

// Side view of the terrain with the robot envelope drawn every `stride` records (and at the last).
std::string render_svg(const TerrainProfile& terrain, const RobotGeometry& geometry,
                       const std::vector<TrajectoryRecord>& records, int stride = 5);

}  // namespace flipper
