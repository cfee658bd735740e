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

#include "sctune/world/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sctune::world {

OccupancyGrid::OccupancyGrid(int width_cells, int height_cells,
                             double resolution, Eigen::Vector2d origin)
    : width_(width_cells),
      height_(height_cells),
      resolution_(resolution),
      origin_(std::move(origin)) {
  if (width_ < 2 || height_ < 2) {
    throw std::invalid_argument("occupancy grid needs at least 2x2 cells");
  }
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw std::invalid_argument("occupancy grid resolution must be positive");
  }
  cells_.assign(static_cast<std::size_t>(width_) * height_, 0);
}

CellIndex OccupancyGrid::cell_of(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d local = (p - origin_) / resolution_;
  return {static_cast<int>(std::floor(local.x())),
          static_cast<int>(std::floor(local.y()))};
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(
      std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

void OccupancyGrid::write_text(std::ostream& out) const {
  std::ostringstream header;
  header.precision(17);
  header << "occupancy_grid 1 " << width_ << ' ' << height_ << ' '
         << resolution_ << ' ' << origin_.x() << ' ' << origin_.y() << '\n';
  out << header.str();
  for (int iy = height_ - 1; iy >= 0; --iy) {
    std::string row(static_cast<std::size_t>(width_), '.');
    for (int ix = 0; ix < width_; ++ix) {
      if (occupied(ix, iy)) row[static_cast<std::size_t>(ix)] = '#';
    }
    out << row << '\n';
  }
}

OccupancyGrid OccupancyGrid::read_text(std::istream& in) {
  std::string magic;
  int version = 0;
  int width = 0;
  int height = 0;
  double resolution = 0.0;
  double ox = 0.0;
  double oy = 0.0;
  if (!(in >> magic >> version >> width >> height >> resolution >> ox >> oy) ||
      magic != "occupancy_grid" || version != 1) {
    throw std::runtime_error("malformed occupancy grid header");
  }
  OccupancyGrid grid(width, height, resolution, {ox, oy});
  for (int iy = height - 1; iy >= 0; --iy) {
    std::string row;
    if (!(in >> row) || static_cast<int>(row.size()) != width) {
      throw std::runtime_error("malformed occupancy grid row");
    }
    for (int ix = 0; ix < width; ++ix) {
      const char c = row[static_cast<std::size_t>(ix)];
      if (c != '#' && c != '.') {
        throw std::runtime_error("unexpected occupancy grid character");
      }
      grid.set_occupied(ix, iy, c == '#');
    }
  }
  return grid;
}

}  // namespace sctune::world
