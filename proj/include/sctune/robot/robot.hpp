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

#include <array>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace sctune::robot {

/// Joint positions (q1 rail [m], q2 and q3 revolute [rad]).
using JointVector = Eigen::Vector3d;
/// Joint velocities, same units per second.
using JointVelocity = Eigen::Vector3d;
/// Cartesian end-effector twist (vx [m/s], vy [m/s], omega [rad/s]).
using Twist = Eigen::Vector3d;

inline constexpr int kSphereCount = 12;
using SphereCenters = std::array<Eigen::Vector2d, kSphereCount>;

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
};

/// Redundant state: the pose is always recomputed from the joints.
struct RobotState {
  Pose2 ee;
  JointVector joints = JointVector::Zero();
};

/// A collision sphere rigidly attached to a link frame. Link 0 is the rail
/// carriage, link 1 the first arm segment, link 2 the C-arm.
struct SphereMount {
  int link = 0;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
};

struct RobotGeometry {
  Eigen::Vector2d rail_origin{0.0, -2.0};
  Eigen::Vector2d rail_direction{1.0, 0.0};
  double link1 = 1.0;
  double link2 = 0.8;
  double sphere_radius = 0.4;
  std::array<SphereMount, kSphereCount> spheres = default_spheres();

  /// Four spheres per structural group, spaced along each segment.
  static std::array<SphereMount, kSphereCount> default_spheres();
  /// Throws std::invalid_argument on a bad geometry.
  void validate() const;
};

struct JointLimits {
  JointVector position_min{-2.0, -3.14159265358979323846, -3.14159265358979323846};
  JointVector position_max{2.0, 3.14159265358979323846, 3.14159265358979323846};
  JointVector velocity_max{0.5, 0.5, 0.5};
  JointVector acceleration_max{2.0, 2.0, 2.0};
  JointVector jerk_max{20.0, 20.0, 20.0};
  double ee_speed_max = 0.6;

  void validate() const;
  bool within_position(const JointVector& q, double tol = 0.0) const;
};

/// Frame origins of the kinematic chain for a configuration.
struct ChainFrames {
  Eigen::Vector2d carriage;  // joint 2 axis
  Eigen::Vector2d elbow;     // joint 3 axis
  Eigen::Vector2d tool;      // end-effector point
  double rail_angle = 0.0;
  double link1_angle = 0.0;
  double link2_angle = 0.0;
  // (cos, sin) of the three angles above.
  Eigen::Vector2d rail_axis = Eigen::Vector2d::UnitX();
  Eigen::Vector2d link1_axis = Eigen::Vector2d::UnitX();
  Eigen::Vector2d link2_axis = Eigen::Vector2d::UnitX();
};

ChainFrames chain_frames(const JointVector& q, const RobotGeometry& geom);

Pose2 forward_kinematics(const JointVector& q, const RobotGeometry& geom);

/// 3x3 map from joint velocities to (x_dot, y_dot, theta_dot).
Eigen::Matrix3d jacobian(const JointVector& q, const RobotGeometry& geom);

SphereCenters sphere_centers(const JointVector& q, const RobotGeometry& geom);
SphereCenters sphere_centers(const ChainFrames& f, const RobotGeometry& geom);

/// Derivative of every sphere center w.r.t. each joint: entry [m].col(i) is
/// d center_m / d q_i.
std::array<Eigen::Matrix<double, 2, 3>, kSphereCount> sphere_center_jacobians(
    const JointVector& q, const RobotGeometry& geom);
std::array<Eigen::Matrix<double, 2, 3>, kSphereCount> sphere_center_jacobians(
    const ChainFrames& f, const SphereCenters& centers, const RobotGeometry& geom);

RobotState make_state(const JointVector& q, const RobotGeometry& geom);

/// Zero-order-hold joint integration; the pose is recomputed through forward
/// kinematics rather than integrated.
RobotState step_kinematics(const RobotState& x, const JointVelocity& u,
                           double sample_time, const RobotGeometry& geom);

void to_json(nlohmann::json& j, const RobotGeometry& geom);
void from_json(const nlohmann::json& j, RobotGeometry& geom);
void to_json(nlohmann::json& j, const JointLimits& limits);
void from_json(const nlohmann::json& j, JointLimits& limits);

}  // namespace sctune::robot
