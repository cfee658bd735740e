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

#include "sctune/world/esdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sctune::world {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact 1-D squared distance transform of a sampled function (lower envelope
// of parabolas). f and d may not alias.
void distance_transform_1d(const std::vector<double>& f, std::vector<double>& d,
                           std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

// Squared Euclidean distance (in cells) from every cell to the nearest cell
// for which `site` is true. All entries are +inf when there is no site.
std::vector<double> squared_edt(const OccupancyGrid& grid, bool site_value) {
  const int w = grid.width();
  const int h = grid.height();
  std::vector<double> out(static_cast<std::size_t>(w) * h, kInf);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      if (grid.occupied(ix, iy) == site_value) out[grid.linear(ix, iy)] = 0.0;
    }
  }
  const int n = std::max(w, h);
  std::vector<double> f(static_cast<std::size_t>(n));
  std::vector<double> d(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);

  f.resize(static_cast<std::size_t>(h));
  d.resize(static_cast<std::size_t>(h));
  for (int ix = 0; ix < w; ++ix) {
    for (int iy = 0; iy < h; ++iy) f[iy] = out[grid.linear(ix, iy)];
    distance_transform_1d(f, d, v, z);
    for (int iy = 0; iy < h; ++iy) out[grid.linear(ix, iy)] = d[iy];
  }
  f.resize(static_cast<std::size_t>(w));
  d.resize(static_cast<std::size_t>(w));
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) f[ix] = out[grid.linear(ix, iy)];
    distance_transform_1d(f, d, v, z);
    for (int ix = 0; ix < w; ++ix) out[grid.linear(ix, iy)] = d[ix];
  }
  return out;
}

}  // namespace

Esdf::Esdf(const OccupancyGrid& grid, double cap)
    : width_(grid.width()),
      height_(grid.height()),
      resolution_(grid.resolution()),
      origin_(grid.origin()),
      cap_(cap) {
  if (grid.free_count() == 0) throw std::invalid_argument("no free space");
  const std::vector<double> to_occupied = squared_edt(grid, true);
  const std::vector<double> to_free = squared_edt(grid, false);
  distance_.resize(to_occupied.size());
  for (int iy = 0; iy < height_; ++iy) {
    for (int ix = 0; ix < width_; ++ix) {
      const std::size_t i = grid.linear(ix, iy);
      if (grid.occupied(ix, iy)) {
        distance_[i] = -resolution_ * std::sqrt(to_free[i]);
      } else {
        distance_[i] = std::min(cap_, resolution_ * std::sqrt(to_occupied[i]));
      }
    }
  }
}

DistanceQuery Esdf::signed_distance(const Eigen::Vector2d& p) const {
  return signed_distance(p, nullptr);
}

DistanceQuery Esdf::signed_distance(const Eigen::Vector2d& p,
                                    Eigen::Vector2d* gradient) const {
  DistanceQuery result;
  const Eigen::Vector2d extent =
      origin_ + resolution_ * Eigen::Vector2d(width_, height_);
  result.out_of_map = p.x() < origin_.x() || p.y() < origin_.y() ||
                      p.x() > extent.x() || p.y() > extent.y() ||
                      !p.allFinite();

  // Continuous coordinates in cell-center units.
  double u = (p.x() - origin_.x()) / resolution_ - 0.5;
  double v = (p.y() - origin_.y()) / resolution_ - 0.5;
  if (!std::isfinite(u)) u = 0.0;
  if (!std::isfinite(v)) v = 0.0;
  const bool clamp_u = u < 0.0 || u > width_ - 1;
  const bool clamp_v = v < 0.0 || v > height_ - 1;
  u = std::clamp(u, 0.0, double(width_ - 1));
  v = std::clamp(v, 0.0, double(height_ - 1));
  const int i0 = std::min(static_cast<int>(u), width_ - 2);
  const int j0 = std::min(static_cast<int>(v), height_ - 2);
  const double fx = u - i0;
  const double fy = v - j0;

  const double d00 = at(i0, j0);
  const double d10 = at(i0 + 1, j0);
  const double d01 = at(i0, j0 + 1);
  const double d11 = at(i0 + 1, j0 + 1);
  const double lower = d00 + fx * (d10 - d00);
  const double upper = d01 + fx * (d11 - d01);
  result.distance = lower + fy * (upper - lower);

  if (gradient != nullptr) {
    const double gx = clamp_u ? 0.0
                              : ((1.0 - fy) * (d10 - d00) + fy * (d11 - d01)) /
                                    resolution_;
    const double gy = clamp_v ? 0.0 : (upper - lower) / resolution_;
    *gradient = Eigen::Vector2d(gx, gy);
  }
  return result;
}

GradientQuery Esdf::distance_gradient(const Eigen::Vector2d& p) const {
  GradientQuery result;
  const double h = resolution_;
  const Eigen::Vector2d lo = origin_;
  const Eigen::Vector2d hi =
      origin_ + resolution_ * Eigen::Vector2d(width_, height_);
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    step[axis] = h;
    const bool back_ok = p[axis] - h >= lo[axis];
    const bool fwd_ok = p[axis] + h <= hi[axis];
    if (back_ok && fwd_ok) {
      result.gradient[axis] = (signed_distance(p + step).distance -
                               signed_distance(p - step).distance) /
                              (2.0 * h);
    } else if (fwd_ok) {
      result.one_sided = true;
      result.gradient[axis] =
          (signed_distance(p + step).distance - signed_distance(p).distance) / h;
    } else {
      result.one_sided = true;
      result.gradient[axis] =
          (signed_distance(p).distance - signed_distance(p - step).distance) / h;
    }
  }
  return result;
}

Esdf build_esdf(const OccupancyGrid& grid, double cap) {
  return Esdf(grid, cap);
}

}  // namespace sctune::world
