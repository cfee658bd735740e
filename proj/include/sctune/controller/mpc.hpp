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

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "sctune/robot/robot.hpp"
#include "sctune/world/esdf.hpp"

namespace sctune::controller {

using robot::JointVelocity;
using robot::RobotState;
using robot::Twist;

/// The tunable parameter vector: horizons, tracking weights and the two
/// obstacle-penalty scales.
struct MpcParams {
  int prediction_horizon = 25;  // Np
  int control_horizon = 13;     // Nc
  Eigen::Vector3d tracking_weights{1.0, 1.0, 1.0};  // diag(Q): x, y, theta
  double penalty_scale = 5.0;       // c1
  double penalty_steepness = 20.0;  // c2 [1/m]

  /// Hand-tuned reference set.
  static MpcParams baseline() { return {}; }
  /// Throws std::invalid_argument unless Np >= Nc >= 1 and all scales > 0.
  void validate() const;
  bool operator==(const MpcParams&) const = default;
};

struct SolverSettings {
  int max_inner_iterations = 40;
  int max_outer_iterations = 8;
  int lbfgs_memory = 8;
  double initial_penalty = 100.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e6;
  double gradient_tolerance = 1e-4;
  double initial_step = 0.05;  // [rad/s or m/s] first trial step of each inner solve
  /// Largest admissible violation of a penalized constraint, in the
  /// constraint's physical units.
  double residual_tolerance = 1e-4;
};

struct ControllerConfig {
  double blend = 0.5;          // alpha
  double sample_time = 0.05;   // Ts [s]
  double clearance = 0.4;      // c3 [m], equal to the sphere radius
  robot::JointLimits limits;
  SolverSettings solver;

  void validate() const;
};

struct ControlResult {
  JointVelocity u0 = JointVelocity::Zero();
  std::vector<JointVelocity> inputs;  // Nc entries
  bool feasible = false;
  int solve_iterations = 0;
  int cost_evaluations = 0;
  int outer_iterations = 0;
  double cost = 0.0;
  double max_residual = 0.0;
  bool out_of_map = false;
  /// Final constraint multipliers, grouped per horizon step.
  std::vector<double> multipliers;
};

/// Residuals of the hard/soft constraint set for a candidate input sequence,
/// evaluated directly from the roll-out. Used post hoc to certify results.
struct ConstraintReport {
  double velocity = 0.0;      // worst |u| excess over the velocity bound
  double position = 0.0;      // worst joint position bound excess
  double acceleration = 0.0;  // worst |du/Ts| excess
  double jerk = 0.0;          // worst |d2u/Ts^2| excess
  double ee_speed = 0.0;      // worst ||(x_dot, y_dot)|| excess
  double max_soft() const;
};

double tracking_cost(const RobotState& x, const JointVelocity& u,
                     const Twist& reference, const Eigen::Vector3d& weights,
                     const robot::RobotGeometry& geom);

/// Sigmoid clearance penalty c1 / (1 + exp(c2 (sd - c3))); the exponent is
/// clamped to [-500, 500].
double obstacle_penalty(double signed_distance, double scale, double steepness,
                        double clearance);

/// Inputs for step k of a horizon with move blocking: U[min(k, Nc - 1)].
inline const JointVelocity& blocked_input(const std::vector<JointVelocity>& u,
                                          int k) {
  return u[static_cast<std::size_t>(
      std::min<int>(k, static_cast<int>(u.size()) - 1))];
}

struct HorizonCost {
  double value = 0.0;
  bool out_of_map = false;
};

/// Blended horizon objective: alpha * sum_{k<Nc} tracking + (1 - alpha) *
/// sum_{k=1..Np} sum_m penalty(sd of sphere m at the rolled-out state k).
HorizonCost horizon_cost(const RobotState& x0,
                         const std::vector<JointVelocity>& inputs,
                         const Twist& reference, const MpcParams& params,
                         const ControllerConfig& cfg,
                         const robot::RobotGeometry& geom,
                         const world::Esdf& esdf);

/// Same objective with its analytic gradient w.r.t. the Nc x 3 inputs
/// (row-major: joint velocities of block 0, then block 1, ...).
double horizon_cost_gradient(const RobotState& x0,
                             const std::vector<JointVelocity>& inputs,
                             const Twist& reference, const MpcParams& params,
                             const ControllerConfig& cfg,
                             const robot::RobotGeometry& geom,
                             const world::Esdf& esdf, Eigen::VectorXd& grad);

ConstraintReport check_constraints(const RobotState& x0,
                                   const std::vector<JointVelocity>& inputs,
                                   const JointVelocity& u_prev,
                                   const MpcParams& params,
                                   const ControllerConfig& cfg,
                                   const robot::RobotGeometry& geom);

/// One receding-horizon solve. Never throws on numerical trouble: an
/// unconverged or constraint-violating result is returned with
/// feasible = false and u0 set to the warm start's first input when
/// `warm_start_feasible`, else zero. `multiplier_warm_start`, when its size
/// matches the constraint count, seeds the multipliers.
ControlResult solve_mpc(const RobotState& x0, const Twist& reference,
                        const MpcParams& params, const ControllerConfig& cfg,
                        const robot::RobotGeometry& geom,
                        const world::Esdf& esdf,
                        const std::optional<std::vector<JointVelocity>>& warm_start,
                        const JointVelocity& u_prev,
                        bool warm_start_feasible = false,
                        const std::vector<double>* multiplier_warm_start = nullptr);

/// Multipliers advanced by one tick (each per-step group moves one step
/// earlier; the final step repeats).
std::vector<double> shift_multipliers(const std::vector<double>& multipliers,
                                      const MpcParams& params);

/// Receding-horizon wrapper owning the warm start and the last applied
/// input. Single owner; not thread-safe.
class SharedController {
 public:
  SharedController(MpcParams params, ControllerConfig cfg,
                   robot::RobotGeometry geom, const world::Esdf& esdf);

  /// Solves for the current state. The returned `applied` input is u0 when
  /// the solve is feasible and the last feasible input otherwise.
  struct Step {
    ControlResult result;
    JointVelocity applied = JointVelocity::Zero();
  };
  Step step(const RobotState& x, const Twist& reference);

  void reset();
  const MpcParams& params() const { return params_; }
  const ControllerConfig& config() const { return cfg_; }
  const robot::RobotGeometry& geometry() const { return geom_; }

 private:
  MpcParams params_;
  ControllerConfig cfg_;
  robot::RobotGeometry geom_;
  const world::Esdf* esdf_;
  std::optional<std::vector<JointVelocity>> warm_start_;
  bool warm_start_feasible_ = false;
  std::vector<double> multipliers_;
  JointVelocity last_applied_ = JointVelocity::Zero();
};

void to_json(nlohmann::json& j, const MpcParams& p);
void from_json(const nlohmann::json& j, MpcParams& p);
void to_json(nlohmann::json& j, const ControllerConfig& c);
void from_json(const nlohmann::json& j, ControllerConfig& c);

}  // namespace sctune::controller
