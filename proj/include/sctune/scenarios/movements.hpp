// Copyright 2026 The sctune Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctune/numerics/rng.hpp"
#include "sctune/robot/robot.hpp"
#include "sctune/world/esdf.hpp"

namespace sctune::scenarios {

/// One constant joystick command held for `duration` seconds. The twist is
/// derived from heading and speed; speed = level * v_max / 3 exactly.
struct VelocitySegment {
  double heading = 0.0;  // [rad]
  int level = 1;         // 1, 2 or 3
  double speed = 0.0;    // [m/s]
  double duration = 0.0; // [s]

  robot::Twist twist() const;
};

struct Movement {
  int id = 0;
  robot::JointVector initial_joints = robot::JointVector::Zero();
  std::vector<VelocitySegment> segments;

  double total_time() const;
  /// Reference twist active at time t (last segment past the end).
  robot::Twist twist_at(double t) const;
};

struct MovementSet {
  std::uint64_t seed = 0;
  std::string environment;
  double v_max = 0.5;
  std::vector<Movement> movements;
};

struct ScenarioOptions {
  int n_mov = 40;
  int n_segments = 2;
  double duration = 20.0;  // T [s]
  double v_max = 0.5;      // [m/s]
  int max_placement_tries = 1000;
};

using ScenarioRng = numerics::Rng;

/// True when every sphere center is inside the map with clearance >= radius.
bool placement_is_clear(const robot::JointVector& q,
                        const robot::RobotGeometry& geom,
                        const world::Esdf& esdf);

/// Throws std::runtime_error("environment too cluttered") when an initial
/// configuration cannot be placed within the try budget.
MovementSet generate_movements(std::uint64_t seed, const ScenarioOptions& opts,
                               const world::Esdf& esdf,
                               const robot::RobotGeometry& geom,
                               const robot::JointLimits& limits,
                               const std::string& environment_name = "");

struct DescribeRow {
  int id = 0;
  robot::Pose2 start;
  std::vector<robot::Twist> vectors;
};

std::vector<DescribeRow> describe(const MovementSet& set,
                                  const robot::RobotGeometry& geom);
std::string format_description(const std::vector<DescribeRow>& rows);

void to_json(nlohmann::json& j, const VelocitySegment& s);
void from_json(const nlohmann::json& j, VelocitySegment& s);
void to_json(nlohmann::json& j, const Movement& m);
void from_json(const nlohmann::json& j, Movement& m);
void to_json(nlohmann::json& j, const MovementSet& s);
void from_json(const nlohmann::json& j, MovementSet& s);

}  // namespace sctune::scenarios
