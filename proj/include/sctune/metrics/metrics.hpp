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

#include <json.hpp>

#include "sctune/robot/robot.hpp"

namespace sctune::metrics {

struct TrajectorySample {
  double t = 0.0;  // simulation time [s]
  robot::RobotState state;
  robot::JointVelocity applied = robot::JointVelocity::Zero();
  std::array<double, robot::kSphereCount> sphere_distances{};
  double solve_time = 0.0;  // [s]
  bool feasible = true;

  double min_distance() const;
};

/// Closed-loop record. Sample g owns the interval [t_g, t_{g+1}); the last
/// sample runs until start + duration.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  double duration = 0.0;  // t_F [s]
};

struct MetricVector {
  double d_ob = 0.0;  // obstacle proximity [m]
  double t_ob = 0.0;  // time near obstacles [%]
  double f_ps = 0.0;  // path smoothness [m]
  double f_cc = 0.0;  // curvature change [rad/m]
  double f_vs = 0.0;  // velocity smoothness (acceleration zero-crossing rate)
  double t_c = 0.0;   // average computation time [ms]

  std::array<double, 6> as_array() const { return {d_ob, t_ob, f_ps, f_cc, f_vs, t_c}; }
};

inline constexpr std::array<const char*, 6> kMetricNames = {
    "d_ob", "t_ob", "f_ps", "f_cc", "f_vs", "t_C"};

/// Weights in metric order; defaults are the published prioritization.
struct MetricWeights {
  std::array<double, 6> w = {0.15, 0.30, 0.15, 0.25, 0.10, 0.05};
  void validate() const;
};

/// Reference scales that map each metric to [0, 1] before weighting.
struct NormalizationSpec {
  double d_ref = 1.0;      // [m]; clearance >= d_ref costs nothing
  double t_ob_ref = 100.0; // [%]
  double f_ps_ref = 1e-4;  // [m]
  double f_cc_ref = 200.0; // [rad/m]
  double f_vs_ref = 2.0;
  double t_c_ref = 200.0;  // [ms]
};

/// Options that are not part of the metric definitions themselves.
struct MetricOptions {
  double d_safe = 0.4;               // [m]
  double min_speed = 0.01;           // curvature singularity guard [m/s]
  double stationary_path = 1e-9;     // [m]
  /// |a| at or below this counts as sign 0 for the zero-crossing rate.
  double accel_deadband = 1e-6;
};

double obstacle_proximity(const Trajectory& traj);
double time_near_obstacles(const Trajectory& traj, double d_safe);
double path_smoothness(const Trajectory& traj, double stationary_path = 1e-9);

struct CurvatureChange {
  double value = 0.0;
  bool degenerate = false;
};
CurvatureChange curvature_change(const Trajectory& traj, double min_speed = 0.01);

double velocity_smoothness(const Trajectory& traj, double accel_deadband = 0.0);
double avg_computation_time(const Trajectory& traj);

/// Total end-effector path length S.
double path_length(const Trajectory& traj);

MetricVector evaluate_metrics(const Trajectory& traj, const MetricOptions& opts);

/// Weighted sum of the clamped, normalized metrics. Throws on non-finite input.
double normalized_objective(const MetricVector& m, const MetricWeights& weights,
                            const NormalizationSpec& norms);

void to_json(nlohmann::json& j, const MetricVector& m);
void from_json(const nlohmann::json& j, MetricVector& m);
void to_json(nlohmann::json& j, const MetricWeights& w);
void from_json(const nlohmann::json& j, MetricWeights& w);
void to_json(nlohmann::json& j, const NormalizationSpec& n);
void from_json(const nlohmann::json& j, NormalizationSpec& n);
void to_json(nlohmann::json& j, const MetricOptions& o);
void from_json(const nlohmann::json& j, MetricOptions& o);

}  // namespace sctune::metrics
