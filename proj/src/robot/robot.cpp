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

#include "sctune/robot/robot.hpp"

#include <cmath>
#include <stdexcept>

namespace sctune::robot {
namespace {

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

// Rotation of v by the angle whose (cos, sin) is `axis`.
Eigen::Vector2d rotate(const Eigen::Vector2d& v, const Eigen::Vector2d& axis) {
  return {axis.x() * v.x() - axis.y() * v.y(), axis.y() * v.x() + axis.x() * v.y()};
}

}  // namespace

std::array<SphereMount, kSphereCount> RobotGeometry::default_spheres() {
  return {{
      {0, {-0.45, 0.0}},
      {0, {-0.15, 0.0}},
      {0, {0.15, 0.0}},
      {0, {0.45, 0.0}},
      {1, {0.25, 0.0}},
      {1, {0.50, 0.0}},
      {1, {0.75, 0.0}},
      {1, {1.00, 0.0}},
      {2, {0.20, 0.0}},
      {2, {0.40, 0.0}},
      {2, {0.60, 0.0}},
      {2, {0.80, 0.0}},
  }};
}

void RobotGeometry::validate() const {
  if (!(sphere_radius > 0.0)) {
    throw std::invalid_argument("sphere radius must be positive");
  }
  if (!(link1 > 0.0) || !(link2 > 0.0)) {
    throw std::invalid_argument("link lengths must be positive");
  }
  if (!(rail_direction.norm() > 0.0)) {
    throw std::invalid_argument("rail direction must be non-zero");
  }
  for (const auto& s : spheres) {
    if (s.link < 0 || s.link > 2) {
      throw std::invalid_argument("sphere link index must be 0, 1 or 2");
    }
  }
}

void JointLimits::validate() const {
  if ((velocity_max.array() <= 0.0).any() ||
      (acceleration_max.array() <= 0.0).any() ||
      (jerk_max.array() <= 0.0).any() || !(ee_speed_max > 0.0)) {
    throw std::invalid_argument("joint limit maxima must be positive");
  }
  if ((position_max.array() <= position_min.array()).any()) {
    throw std::invalid_argument("joint position range is empty");
  }
}

bool JointLimits::within_position(const JointVector& q, double tol) const {
  return ((q.array() >= position_min.array() - tol) &&
          (q.array() <= position_max.array() + tol))
      .all();
}

ChainFrames chain_frames(const JointVector& q, const RobotGeometry& geom) {
  ChainFrames f;
  const Eigen::Vector2d dir = geom.rail_direction.normalized();
  f.rail_angle = std::atan2(dir.y(), dir.x());
  f.link1_angle = q[1];
  f.link2_angle = q[1] + q[2];
  f.rail_axis = dir;
  f.link1_axis = {std::cos(f.link1_angle), std::sin(f.link1_angle)};
  f.link2_axis = {std::cos(f.link2_angle), std::sin(f.link2_angle)};
  f.carriage = geom.rail_origin + q[0] * dir;
  f.elbow = f.carriage + geom.link1 * f.link1_axis;
  f.tool = f.elbow + geom.link2 * f.link2_axis;
  return f;
}

Pose2 forward_kinematics(const JointVector& q, const RobotGeometry& geom) {
  const ChainFrames f = chain_frames(q, geom);
  return {f.tool.x(), f.tool.y(), f.link2_angle};
}

Eigen::Matrix3d jacobian(const JointVector& q, const RobotGeometry& geom) {
  const ChainFrames f = chain_frames(q, geom);
  const Eigen::Vector2d dir = geom.rail_direction.normalized();
  const Eigen::Vector2d c2 = perp(f.tool - f.carriage);
  const Eigen::Vector2d c3 = perp(f.tool - f.elbow);
  Eigen::Matrix3d j;
  j << dir.x(), c2.x(), c3.x(),
       dir.y(), c2.y(), c3.y(),
       0.0, 1.0, 1.0;
  return j;
}

SphereCenters sphere_centers(const JointVector& q, const RobotGeometry& geom) {
  return sphere_centers(chain_frames(q, geom), geom);
}

SphereCenters sphere_centers(const ChainFrames& f, const RobotGeometry& geom) {
  SphereCenters out;
  for (int m = 0; m < kSphereCount; ++m) {
    const SphereMount& s = geom.spheres[m];
    switch (s.link) {
      case 0:
        out[m] = f.carriage + rotate(s.offset, f.rail_axis);
        break;
      case 1:
        out[m] = f.carriage + rotate(s.offset, f.link1_axis);
        break;
      default:
        out[m] = f.elbow + rotate(s.offset, f.link2_axis);
        break;
    }
  }
  return out;
}

std::array<Eigen::Matrix<double, 2, 3>, kSphereCount> sphere_center_jacobians(
    const JointVector& q, const RobotGeometry& geom) {
  const ChainFrames f = chain_frames(q, geom);
  return sphere_center_jacobians(f, sphere_centers(f, geom), geom);
}

std::array<Eigen::Matrix<double, 2, 3>, kSphereCount> sphere_center_jacobians(
    const ChainFrames& f, const SphereCenters& centers, const RobotGeometry& geom) {
  const Eigen::Vector2d& dir = f.rail_axis;
  std::array<Eigen::Matrix<double, 2, 3>, kSphereCount> out;
  for (int m = 0; m < kSphereCount; ++m) {
    auto& jm = out[m];
    jm.col(0) = dir;
    jm.col(1).setZero();
    jm.col(2).setZero();
    const int link = geom.spheres[m].link;
    if (link >= 1) jm.col(1) = perp(centers[m] - f.carriage);
    if (link >= 2) jm.col(2) = perp(centers[m] - f.elbow);
  }
  return out;
}

RobotState make_state(const JointVector& q, const RobotGeometry& geom) {
  return {forward_kinematics(q, geom), q};
}

RobotState step_kinematics(const RobotState& x, const JointVelocity& u,
                           double sample_time, const RobotGeometry& geom) {
  return make_state(x.joints + sample_time * u, geom);
}

namespace {

nlohmann::json vec(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
nlohmann::json vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Eigen::Vector2d vec2(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}
Eigen::Vector3d vec3(const nlohmann::json& j) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, v, v};
  }
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void to_json(nlohmann::json& j, const RobotGeometry& geom) {
  nlohmann::json spheres = nlohmann::json::array();
  for (const auto& s : geom.spheres) {
    spheres.push_back({{"link", s.link}, {"offset", vec(s.offset)}});
  }
  j = {{"rail_origin", vec(geom.rail_origin)},
       {"rail_direction", vec(geom.rail_direction)},
       {"link_lengths", {geom.link1, geom.link2}},
       {"sphere_radius", geom.sphere_radius},
       {"spheres", spheres}};
}

void from_json(const nlohmann::json& j, RobotGeometry& geom) {
  geom = RobotGeometry{};
  if (j.contains("rail_origin")) geom.rail_origin = vec2(j.at("rail_origin"));
  if (j.contains("rail_direction")) {
    geom.rail_direction = vec2(j.at("rail_direction"));
  }
  if (j.contains("link_lengths")) {
    geom.link1 = j.at("link_lengths").at(0).get<double>();
    geom.link2 = j.at("link_lengths").at(1).get<double>();
  }
  geom.sphere_radius = j.value("sphere_radius", geom.sphere_radius);
  if (j.contains("spheres")) {
    const auto& s = j.at("spheres");
    if (!s.is_array() || s.size() != kSphereCount) {
      throw std::invalid_argument("robot geometry needs exactly 12 spheres");
    }
    for (int m = 0; m < kSphereCount; ++m) {
      geom.spheres[m].link = s.at(m).at("link").get<int>();
      geom.spheres[m].offset = vec2(s.at(m).at("offset"));
    }
  }
  geom.validate();
}

void to_json(nlohmann::json& j, const JointLimits& limits) {
  j = {{"position_min", vec(limits.position_min)},
       {"position_max", vec(limits.position_max)},
       {"velocity_max", vec(limits.velocity_max)},
       {"acceleration_max", vec(limits.acceleration_max)},
       {"jerk_max", vec(limits.jerk_max)},
       {"ee_speed_max", limits.ee_speed_max}};
}

void from_json(const nlohmann::json& j, JointLimits& limits) {
  limits = JointLimits{};
  if (j.contains("position_min")) limits.position_min = vec3(j.at("position_min"));
  if (j.contains("position_max")) limits.position_max = vec3(j.at("position_max"));
  if (j.contains("velocity_max")) limits.velocity_max = vec3(j.at("velocity_max"));
  if (j.contains("acceleration_max")) {
    limits.acceleration_max = vec3(j.at("acceleration_max"));
  }
  if (j.contains("jerk_max")) limits.jerk_max = vec3(j.at("jerk_max"));
  limits.ee_speed_max = j.value("ee_speed_max", limits.ee_speed_max);
  limits.validate();
}

}  // namespace sctune::robot
