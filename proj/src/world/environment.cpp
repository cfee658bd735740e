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

#include "sctune/world/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace sctune::world {

EnvironmentSpec EnvironmentSpec::operating_room() {
  EnvironmentSpec spec;
  spec.name = "operating_room";
  spec.obstacles = {
      {"back_wall", {-4.0, -3.0}, {4.0, -2.8}},
      {"side_wall", {-4.0, -2.8}, {-3.8, 3.0}},
      {"patient_table", {-1.0, -0.3}, {1.0, 0.3}},
  };
  return spec;
}

EnvironmentSpec EnvironmentSpec::empty_room() {
  EnvironmentSpec spec;
  spec.name = "empty";
  return spec;
}

EnvironmentSpec EnvironmentSpec::named(const std::string& layout) {
  if (layout == "operating_room" || layout == "default") {
    return operating_room();
  }
  if (layout == "empty") return empty_room();
  throw std::invalid_argument("unknown environment layout: " + layout);
}

OccupancyGrid builtin_environment(const EnvironmentSpec& spec) {
  if (!(spec.resolution > 0.0) || !(spec.width > 0.0) || !(spec.height > 0.0)) {
    throw std::invalid_argument("environment size and resolution must be positive");
  }
  const int w = static_cast<int>(std::lround(spec.width / spec.resolution));
  const int h = static_cast<int>(std::lround(spec.height / spec.resolution));
  OccupancyGrid grid(w, h, spec.resolution, spec.origin);

  constexpr double kTol = 1e-9;
  const Eigen::Vector2d room_max = grid.extent_max();
  for (const auto& rect : spec.obstacles) {
    if (!(rect.max.x() > rect.min.x()) || !(rect.max.y() > rect.min.y())) {
      throw std::invalid_argument("obstacle '" + rect.name +
                                  "' has zero or negative area");
    }
    if (rect.min.x() < spec.origin.x() - kTol ||
        rect.min.y() < spec.origin.y() - kTol ||
        rect.max.x() > room_max.x() + kTol ||
        rect.max.y() > room_max.y() + kTol) {
      throw std::invalid_argument("obstacle '" + rect.name +
                                  "' lies outside the room");
    }
    for (int iy = 0; iy < h; ++iy) {
      for (int ix = 0; ix < w; ++ix) {
        const Eigen::Vector2d c = grid.cell_center(ix, iy);
        if (c.x() >= rect.min.x() - kTol && c.x() <= rect.max.x() + kTol &&
            c.y() >= rect.min.y() - kTol && c.y() <= rect.max.y() + kTol) {
          grid.set_occupied(ix, iy);
        }
      }
    }
  }
  if (grid.free_count() == 0) throw std::invalid_argument("no free space");
  return grid;
}

namespace {

nlohmann::json vec_json(const Eigen::Vector2d& v) {
  return nlohmann::json::array({v.x(), v.y()});
}

Eigen::Vector2d vec_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected a 2-element array");
  }
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

void to_json(nlohmann::json& j, const EnvironmentSpec& spec) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& r : spec.obstacles) {
    obstacles.push_back(
        {{"name", r.name}, {"min", vec_json(r.min)}, {"max", vec_json(r.max)}});
  }
  j = {{"version", spec.version},     {"name", spec.name},
       {"width", spec.width},         {"height", spec.height},
       {"resolution", spec.resolution}, {"origin", vec_json(spec.origin)},
       {"obstacles", obstacles}};
}

void from_json(const nlohmann::json& j, EnvironmentSpec& spec) {
  spec = EnvironmentSpec{};
  spec.version = j.value("version", 1);
  spec.name = j.value("name", std::string("custom"));
  spec.width = j.at("width").get<double>();
  spec.height = j.at("height").get<double>();
  spec.resolution = j.at("resolution").get<double>();
  if (j.contains("origin")) spec.origin = vec_from(j.at("origin"));
  for (const auto& o : j.value("obstacles", nlohmann::json::array())) {
    spec.obstacles.push_back({o.value("name", std::string("obstacle")),
                              vec_from(o.at("min")), vec_from(o.at("max"))});
  }
}

EnvironmentSpec environment_from_json(const nlohmann::json& j) {
  if (j.is_string()) return EnvironmentSpec::named(j.get<std::string>());
  if (j.is_object() && j.contains("layout")) {
    return EnvironmentSpec::named(j.at("layout").get<std::string>());
  }
  return j.get<EnvironmentSpec>();
}

}  // namespace sctune::world
