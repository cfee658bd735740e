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

#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "sctune/world/occupancy_grid.hpp"

namespace sctune::world {

/// Axis-aligned obstacle rectangle in world coordinates (meters).
struct RectObstacle {
  std::string name;
  Eigen::Vector2d min = Eigen::Vector2d::Zero();
  Eigen::Vector2d max = Eigen::Vector2d::Zero();
};

/// Room description that rasterizes into an OccupancyGrid.
struct EnvironmentSpec {
  int version = 1;
  std::string name = "custom";
  double width = 8.0;
  double height = 6.0;
  double resolution = 0.05;
  Eigen::Vector2d origin{-4.0, -3.0};
  std::vector<RectObstacle> obstacles;

  /// Operating-room layout: a back wall behind the rail, a side wall on the
  /// left and a 2.0 m x 0.6 m patient table centered in x.
  static EnvironmentSpec operating_room();
  /// Same room, no obstacles.
  static EnvironmentSpec empty_room();
  /// "operating_room" | "default" | "empty"; throws on an unknown name.
  static EnvironmentSpec named(const std::string& layout);
};

/// Rasterizes an EnvironmentSpec: a cell is occupied iff its center lies inside (or on
/// the boundary of) any obstacle rectangle. Throws std::invalid_argument for
/// zero-area rectangles or rectangles outside the room.
OccupancyGrid builtin_environment(const EnvironmentSpec& spec);

void to_json(nlohmann::json& j, const EnvironmentSpec& spec);
void from_json(const nlohmann::json& j, EnvironmentSpec& spec);

/// Accepts either a layout name or a full spec object.
EnvironmentSpec environment_from_json(const nlohmann::json& j);

}  // namespace sctune::world
