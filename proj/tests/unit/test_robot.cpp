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

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <doctest.h>

#include "sctune/numerics/rng.hpp"
#include "sctune/robot/robot.hpp"

using namespace sctune;

namespace {

using Transform = Eigen::Matrix3d;

Transform translation(const Eigen::Vector2d& t) {
  Transform m = Transform::Identity();
  m.block<2, 1>(0, 2) = t;
  return m;
}

Transform rotation(double a) {
  Transform m = Transform::Identity();
  m.block<2, 2>(0, 0) = Eigen::Rotation2Dd(a).toRotationMatrix();
  return m;
}

Eigen::Vector2d apply(const Transform& m, const Eigen::Vector2d& p) {
  return (m * Eigen::Vector3d(p.x(), p.y(), 1.0)).head<2>();
}

// Chain of homogeneous transforms: rail prismatic joint, then two revolute
// joints whose angles are measured in the world frame for q2 and relative for q3.
struct Chain {
  Transform carriage_rail;  // carriage frame aligned with the rail
  Transform link1;          // at the carriage, rotated by q2
  Transform link2;          // at the elbow, rotated by q2 + q3
  Transform tool;
};

Chain homogeneous_chain(const robot::JointVector& q, const robot::RobotGeometry& g) {
  const Eigen::Vector2d dir = g.rail_direction.normalized();
  const double rail = std::atan2(dir.y(), dir.x());
  Chain c;
  const Transform carriage = translation(g.rail_origin) * translation(q[0] * dir);
  c.carriage_rail = carriage * rotation(rail);
  c.link1 = carriage * rotation(q[1]);
  c.link2 = c.link1 * translation({g.link1, 0.0}) * rotation(q[2]);
  c.tool = c.link2 * translation({g.link2, 0.0});
  return c;
}

robot::JointVector random_q(numerics::Rng& rng) {
  return {rng.uniform(-2.0, 2.0), rng.uniform(-std::numbers::pi, std::numbers::pi),
          rng.uniform(-std::numbers::pi, std::numbers::pi)};
}

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

TEST_SUITE("robot") {
  TEST_CASE("forward kinematics matches the homogeneous-transform chain") {
    numerics::Rng rng(21);
    robot::RobotGeometry g;
    g.rail_direction = {0.8, 0.6};
    for (int i = 0; i < 100; ++i) {
      const robot::JointVector q = random_q(rng);
      const Chain c = homogeneous_chain(q, g);
      const robot::Pose2 p = robot::forward_kinematics(q, g);
      const Eigen::Vector2d tip = apply(c.tool, Eigen::Vector2d::Zero());
      CHECK(p.x == doctest::Approx(tip.x()).epsilon(1e-12));
      CHECK(p.y == doctest::Approx(tip.y()).epsilon(1e-12));
      const double theta = std::atan2(c.tool(1, 0), c.tool(0, 0));
      CHECK(std::abs(wrap(p.theta - theta)) < 1e-12);
    }
  }

  TEST_CASE("sphere centers follow their link frames") {
    numerics::Rng rng(22);
    const robot::RobotGeometry g;
    for (int i = 0; i < 50; ++i) {
      const robot::JointVector q = random_q(rng);
      const Chain c = homogeneous_chain(q, g);
      const robot::SphereCenters centers = robot::sphere_centers(q, g);
      for (int m = 0; m < robot::kSphereCount; ++m) {
        const robot::SphereMount& s = g.spheres[m];
        const Transform& frame = s.link == 0 ? c.carriage_rail : s.link == 1 ? c.link1 : c.link2;
        CHECK((centers[m] - apply(frame, s.offset)).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("jacobian matches central differences") {
    numerics::Rng rng(23);
    const robot::RobotGeometry g;
    const double h = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const robot::JointVector q = random_q(rng);
      const Eigen::Matrix3d J = robot::jacobian(q, g);
      for (int k = 0; k < 3; ++k) {
        robot::JointVector qp = q;
        robot::JointVector qm = q;
        qp[k] += h;
        qm[k] -= h;
        const robot::Pose2 a = robot::forward_kinematics(qp, g);
        const robot::Pose2 b = robot::forward_kinematics(qm, g);
        const Eigen::Vector3d fd((a.x - b.x) / (2 * h), (a.y - b.y) / (2 * h),
                                 wrap(a.theta - b.theta) / (2 * h));
        worst = std::max(worst, (J.col(k) - fd).cwiseAbs().maxCoeff());
      }
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("sphere center jacobians match central differences") {
    numerics::Rng rng(24);
    const robot::RobotGeometry g;
    const double h = 1e-6;
    for (int i = 0; i < 30; ++i) {
      const robot::JointVector q = random_q(rng);
      const auto J = robot::sphere_center_jacobians(q, g);
      const robot::ChainFrames f = robot::chain_frames(q, g);
      const auto J2 = robot::sphere_center_jacobians(f, robot::sphere_centers(f, g), g);
      for (int k = 0; k < 3; ++k) {
        robot::JointVector qp = q;
        robot::JointVector qm = q;
        qp[k] += h;
        qm[k] -= h;
        const auto a = robot::sphere_centers(qp, g);
        const auto b = robot::sphere_centers(qm, g);
        for (int m = 0; m < robot::kSphereCount; ++m) {
          const Eigen::Vector2d fd = (a[m] - b[m]) / (2 * h);
          CHECK((J[m].col(k) - fd).norm() < 1e-6);
          CHECK((J2[m].col(k) - J[m].col(k)).norm() < 1e-14);
        }
      }
    }
  }

  TEST_CASE("zero-order hold integration recomputes the pose") {
    const robot::RobotGeometry g;
    const robot::RobotState x = robot::make_state({0.1, 1.0, 0.5}, g);
    const robot::RobotState y = robot::step_kinematics(x, {0.2, -0.1, 0.3}, 0.05, g);
    CHECK(y.joints[0] == doctest::Approx(0.11));
    CHECK(y.joints[1] == doctest::Approx(0.995));
    CHECK(y.joints[2] == doctest::Approx(0.515));
    const robot::Pose2 p = robot::forward_kinematics(y.joints, g);
    CHECK(y.ee.x == p.x);
    CHECK(y.ee.y == p.y);
    CHECK(y.ee.theta == p.theta);
  }

  TEST_CASE("geometry validation and json round trip") {
    robot::RobotGeometry g;
    g.link1 = 1.3;
    const nlohmann::json j = g;
    const robot::RobotGeometry back = j.get<robot::RobotGeometry>();
    CHECK(back.link1 == 1.3);
    CHECK(back.spheres[7].offset == g.spheres[7].offset);
    robot::RobotGeometry bad;
    bad.sphere_radius = -1.0;
    CHECK_THROWS(bad.validate());
    robot::JointLimits limits;
    CHECK(limits.within_position({0.0, 0.0, 0.0}));
    CHECK_FALSE(limits.within_position({2.5, 0.0, 0.0}));
  }
}
