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
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sctune::world {

/// Index of a grid cell; (0, 0) is the cell whose lower-left corner is the
/// grid origin.
struct CellIndex {
  int ix = 0;
  int iy = 0;
};

/// Binary 2-D occupancy grid in the world frame.
class OccupancyGrid {
 public:
  /// Throws std::invalid_argument unless width, height >= 2 and resolution > 0.
  OccupancyGrid(int width_cells, int height_cells, double resolution,
                Eigen::Vector2d origin);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector2d& origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }

  bool occupied(int ix, int iy) const { return cells_[linear(ix, iy)] != 0; }
  void set_occupied(int ix, int iy, bool value = true) {
    cells_[linear(ix, iy)] = value ? 1 : 0;
  }

  bool contains(int ix, int iy) const {
    return ix >= 0 && iy >= 0 && ix < width_ && iy < height_;
  }
  std::size_t linear(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(ix);
  }

  Eigen::Vector2d cell_center(int ix, int iy) const {
    return origin_ + resolution_ * Eigen::Vector2d(ix + 0.5, iy + 0.5);
  }
  /// Cell containing p; may lie outside the grid.
  CellIndex cell_of(const Eigen::Vector2d& p) const;

  std::size_t occupied_count() const;
  std::size_t free_count() const { return size() - occupied_count(); }

  /// Upper-right corner of the mapped rectangle.
  Eigen::Vector2d extent_max() const {
    return origin_ + resolution_ * Eigen::Vector2d(width_, height_);
  }

  /// Plain-text dump: a header line followed by one row per y index (highest
  /// row first), '#' for occupied and '.' for free.
  void write_text(std::ostream& out) const;
  static OccupancyGrid read_text(std::istream& in);

  bool operator==(const OccupancyGrid& other) const = default;

 private:
  int width_;
  int height_;
  double resolution_;
  Eigen::Vector2d origin_;
  std::vector<std::uint8_t> cells_;
};

}  // namespace sctune::world
