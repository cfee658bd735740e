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

#include <vector>

#include <Eigen/Core>

#include "sctune/world/occupancy_grid.hpp"

namespace sctune::world {

/// Free-space distances are capped here; an obstacle-free grid reports the cap
/// everywhere.
inline constexpr double kDistanceCap = 10.0;

struct DistanceQuery {
  double distance = 0.0;
  bool out_of_map = false;
};

struct GradientQuery {
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  /// Set when a central difference did not fit inside the grid and a
  /// one-sided difference was used instead.
  bool one_sided = false;
};

/// Euclidean signed distance field sampled at cell centers. Positive in free
/// space, negative inside obstacles. Immutable once built.
class Esdf {
 public:
  /// Throws std::invalid_argument("no free space") for an all-occupied grid.
  explicit Esdf(const OccupancyGrid& grid, double cap = kDistanceCap);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector2d& origin() const { return origin_; }
  double cap() const { return cap_; }

  double at(int ix, int iy) const {
    return distance_[static_cast<std::size_t>(iy) * width_ + ix];
  }

  /// Bilinear interpolation between the four surrounding cell centers. Points
  /// outside the mapped rectangle are clamped to it and flagged.
  DistanceQuery signed_distance(const Eigen::Vector2d& p) const;

  /// Same interpolation, also returning the exact gradient of the bilinear
  /// interpolant (used by the controller's analytic cost gradient).
  DistanceQuery signed_distance(const Eigen::Vector2d& p,
                                Eigen::Vector2d* gradient) const;

  /// Central finite difference of signed_distance with step = resolution.
  GradientQuery distance_gradient(const Eigen::Vector2d& p) const;

 private:
  int width_;
  int height_;
  double resolution_;
  Eigen::Vector2d origin_;
  double cap_;
  std::vector<double> distance_;
};

/// Convenience wrapper matching the free-function form used by callers that
/// only hold a grid.
Esdf build_esdf(const OccupancyGrid& grid, double cap = kDistanceCap);

}  // namespace sctune::world
