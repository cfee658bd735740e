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

#include <doctest.h>

#include "oracles.hpp"
#include "sctune/metrics/metrics.hpp"
#include "sctune/numerics/rng.hpp"

using namespace sctune;
using namespace sctune::testing;

namespace {

// Trajectory from end-effector poses and joint rates on a uniform clock.
metrics::Trajectory make_traj(const std::vector<robot::Pose2>& poses, double dt,
                              const std::vector<robot::JointVelocity>& applied = {}) {
  metrics::Trajectory t;
  for (std::size_t g = 0; g < poses.size(); ++g) {
    metrics::TrajectorySample s;
    s.t = static_cast<double>(g) * dt;
    s.state.ee = poses[g];
    s.applied = applied.empty() ? robot::JointVelocity::Zero() : applied[g];
    s.sphere_distances.fill(1.0);
    t.samples.push_back(s);
  }
  t.duration = static_cast<double>(poses.size()) * dt;
  return t;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("all six metrics match naive transcriptions on random trajectories") {
    numerics::Rng rng(41);
    const metrics::MetricOptions opts;
    for (int i = 0; i < 100; ++i) {
      const metrics::Trajectory t = random_traj(rng);
      const metrics::MetricVector m = metrics::evaluate_metrics(t, opts);
      CHECK(std::abs(m.d_ob - naive_d_ob(t)) <= 1e-9);
      CHECK(std::abs(m.t_ob - naive_t_ob(t, opts.d_safe)) <= 1e-9);
      CHECK(std::abs(m.f_ps - naive_f_ps(t)) <= 1e-9);
      CHECK(std::abs(m.f_cc - naive_f_cc(t, opts.min_speed)) <= 1e-9);
      CHECK(std::abs(m.f_vs - naive_f_vs(t, opts.accel_deadband)) <= 1e-9);
      CHECK(std::abs(m.t_c - naive_t_c(t)) <= 1e-9);
    }
  }

  TEST_CASE("obstacle proximity picks the single minimum") {
    metrics::Trajectory t = make_traj(std::vector<robot::Pose2>(20), 0.05);
    t.samples[7].sphere_distances[3] = 0.63;
    CHECK(metrics::obstacle_proximity(t) == 0.63);
    for (auto& s : t.samples) s.sphere_distances.fill(0.5);
    CHECK(metrics::obstacle_proximity(t) == 0.5);
    CHECK_THROWS(metrics::obstacle_proximity(metrics::Trajectory{}));
  }

  TEST_CASE("time near obstacles on uniform sampling") {
    metrics::Trajectory t = make_traj(std::vector<robot::Pose2>(10), 0.1);
    CHECK(metrics::time_near_obstacles(t, 0.4) == 0.0);
    for (int g = 4; g < 7; ++g) t.samples[static_cast<std::size_t>(g)].sphere_distances[0] = 0.3;
    CHECK(metrics::time_near_obstacles(t, 0.4) == doctest::Approx(30.0));
    for (auto& s : t.samples) s.sphere_distances[5] = 0.4;
    CHECK(metrics::time_near_obstacles(t, 0.4) == doctest::Approx(100.0));
    t.duration = 0.0;
    CHECK_THROWS(metrics::time_near_obstacles(t, 0.4));
  }

  TEST_CASE("straight line at constant speed has zero smoothness metrics") {
    std::vector<robot::Pose2> line;
    for (int g = 0; g < 50; ++g) line.push_back({0.25 * 0.02 * g, 0.0, 0.7});
    const metrics::Trajectory t = make_traj(line, 0.02);
    CHECK(metrics::path_smoothness(t) < 1e-20);
    CHECK(metrics::curvature_change(t).value == 0.0);
    CHECK_FALSE(metrics::curvature_change(t).degenerate);
  }

  TEST_CASE("single kink has the closed-form path smoothness") {
    std::vector<robot::Pose2> path;
    for (int g = 0; g <= 5; ++g) path.push_back({0.1 * g, 0.0, 0.0});
    for (int g = 1; g <= 5; ++g) path.push_back({0.5, 0.1 * g, 0.0});
    const metrics::Trajectory t = make_traj(path, 0.1);
    CHECK(metrics::path_smoothness(t) == doctest::Approx(0.02 / 1.0));
  }

  TEST_CASE("zig-zag is rougher than a straight path of equal length") {
    std::vector<robot::Pose2> zig;
    std::vector<robot::Pose2> line;
    const double step = 0.1;
    for (int g = 0; g < 20; ++g) {
      zig.push_back({step / std::sqrt(2.0) * g, (g % 2) * step / std::sqrt(2.0), 0.0});
      line.push_back({step * g, 0.0, 0.0});
    }
    CHECK(metrics::path_smoothness(make_traj(zig, 0.1)) > 0.0);
    CHECK(metrics::path_length(make_traj(zig, 0.1)) == doctest::Approx(metrics::path_length(make_traj(line, 0.1))));
    CHECK(metrics::path_smoothness(make_traj(line, 0.1)) < 1e-20);
  }

  TEST_CASE("circular arc at constant speed has constant curvature") {
    const double r = 0.8;
    const double w = 0.5;  // rad/s along the arc
    std::vector<robot::Pose2> arc;
    for (int g = 0; g < 40; ++g) {
      const double a = w * 0.05 * g;
      arc.push_back({r * std::cos(a), r * std::sin(a), a + std::numbers::pi / 2});
    }
    CHECK(metrics::curvature_change(make_traj(arc, 0.05)).value < 1e-9);
  }

  TEST_CASE("straight-then-arc composite changes curvature once") {
    const double r = 0.5;
    const double v = 0.2;
    const double dt = 0.05;
    std::vector<robot::Pose2> path;
    for (int g = 0; g <= 20; ++g) path.push_back({v * dt * g - v * dt * 20, -r, 0.0});
    // Arc of radius r about the origin, heading changing at v / r.
    for (int g = 1; g <= 20; ++g) {
      const double a = -std::numbers::pi / 2 + (v / r) * dt * g;
      path.push_back({r * std::cos(a), r * std::sin(a), a + std::numbers::pi / 2});
    }
    const metrics::Trajectory t = make_traj(path, dt);
    const double chord = 2 * r * std::sin(v * dt / (2 * r));
    // Curvature measured on chords: omega / (chord / dt).
    const double kappa = (v / r) / (chord / dt);
    CHECK(metrics::curvature_change(t).value ==
          doctest::Approx(kappa / metrics::path_length(t)).epsilon(1e-9));
  }

  TEST_CASE("velocity smoothness closed forms") {
    const std::vector<robot::Pose2> poses(30);
    std::vector<robot::JointVelocity> ramp;
    std::vector<robot::JointVelocity> alternate;
    std::vector<robot::JointVelocity> still(30, robot::JointVelocity::Zero());
    for (int g = 0; g < 30; ++g) {
      ramp.push_back(robot::JointVelocity::Constant(0.01 * g));
      alternate.push_back(robot::JointVelocity::Constant(g % 2 == 0 ? 0.1 : -0.1));
    }
    CHECK(metrics::velocity_smoothness(make_traj(poses, 0.05, ramp), 1e-6) == 0.0);
    CHECK(metrics::velocity_smoothness(make_traj(poses, 0.05, alternate), 1e-6) == doctest::Approx(2.0));
    CHECK(metrics::velocity_smoothness(make_traj(poses, 0.05, still), 1e-6) == 0.0);
    CHECK_THROWS(metrics::velocity_smoothness(make_traj(std::vector<robot::Pose2>(2), 0.05)));
  }

  TEST_CASE("average computation time in milliseconds") {
    metrics::Trajectory t = make_traj(std::vector<robot::Pose2>(2), 0.05);
    t.samples[0].solve_time = 0.040;
    t.samples[1].solve_time = 0.060;
    CHECK(metrics::avg_computation_time(t) == doctest::Approx(50.0));
  }

  TEST_CASE("normalized objective weights and clamps") {
    const metrics::MetricWeights w;
    const metrics::NormalizationSpec n;
    metrics::MetricVector m;
    m.d_ob = 2.0;
    CHECK(metrics::normalized_objective(m, w, n) == 0.0);
    m.d_ob = 0.0;
    m.t_ob = 1000.0;
    m.f_ps = 1.0;
    m.f_cc = 1e9;
    m.f_vs = 3.0;
    m.t_c = 1e4;
    CHECK(metrics::normalized_objective(m, w, n) == doctest::Approx(1.0));
    m = {};
    m.d_ob = 0.5;
    m.t_ob = 10.0;
    CHECK(metrics::normalized_objective(m, w, n) == doctest::Approx(0.15 * 0.5 + 0.30 * 0.1));
    m.f_cc = std::nan("");
    CHECK_THROWS(metrics::normalized_objective(m, w, n));
    metrics::MetricWeights bad;
    bad.w[0] = 0.5;
    CHECK_THROWS(bad.validate());
    double total = 0.0;
    for (double v : w.w) total += v;
    CHECK(total == doctest::Approx(1.0));
  }
}
