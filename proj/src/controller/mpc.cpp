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

#include "sctune/controller/mpc.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>
#include <stdexcept>

#include "sctune/numerics/box_lbfgs.hpp"

namespace sctune::controller {
namespace {

using robot::JointVector;
using robot::kSphereCount;

constexpr double kMaxExponent = 500.0;

// Derivative of (J(q) u) w.r.t. q restricted to the planar rows; column i is
// d(J u)_{xy} / d q_i. The rail column of J is constant.
Eigen::Matrix<double, 2, 3> twist_jacobian_wrt_q(const robot::ChainFrames& f,
                                                 const JointVelocity& u) {
  const Eigen::Vector2d from_carriage = f.tool - f.carriage;
  const Eigen::Vector2d from_elbow = f.tool - f.elbow;
  Eigen::Matrix<double, 2, 3> d;
  d.col(0).setZero();
  d.col(1) = -from_carriage * u[1] - from_elbow * u[2];
  d.col(2) = -from_elbow * (u[1] + u[2]);
  return d;
}

Eigen::Vector3d ee_twist(const robot::ChainFrames& f,
                         const Eigen::Vector2d& rail_dir,
                         const JointVelocity& u) {
  const Eigen::Vector2d from_carriage = f.tool - f.carriage;
  const Eigen::Vector2d from_elbow = f.tool - f.elbow;
  const Eigen::Vector2d v = rail_dir * u[0] +
                            Eigen::Vector2d(-from_carriage.y(), from_carriage.x()) * u[1] +
                            Eigen::Vector2d(-from_elbow.y(), from_elbow.x()) * u[2];
  return {v.x(), v.y(), u[1] + u[2]};
}

struct PenaltyValue {
  double value;
  double slope;  // d value / d sd
};

PenaltyValue penalty_with_slope(double sd, double scale, double steepness,
                                double clearance) {
  const double z = steepness * (sd - clearance);
  if (z >= kMaxExponent) {
    return {scale / (1.0 + std::exp(kMaxExponent)), 0.0};
  }
  if (z <= -kMaxExponent) {
    return {scale / (1.0 + std::exp(-kMaxExponent)), 0.0};
  }
  const double e = std::exp(z);
  const double denom = 1.0 + e;
  return {scale / denom, -scale * steepness * e / (denom * denom)};
}

// Shared roll-out/objective/constraint evaluator over the flattened inputs.
class HorizonProblem {
 public:
  HorizonProblem(const RobotState& x0, const Twist& reference,
                 const MpcParams& params, const ControllerConfig& cfg,
                 const robot::RobotGeometry& geom, const world::Esdf& esdf,
                 const JointVelocity& u_prev)
      : x0_(x0),
        reference_(reference),
        params_(params),
        cfg_(cfg),
        geom_(geom),
        esdf_(esdf),
        u_prev_(u_prev),
        np_(params.prediction_horizon),
        nc_(params.control_horizon),
        rail_dir_(geom.rail_direction.normalized()),
        q_(static_cast<std::size_t>(np_) + 1),
        frames_(static_cast<std::size_t>(np_) + 1),
        grad_q_(static_cast<std::size_t>(np_) + 1) {}

  int variable_count() const { return 3 * nc_; }

  int constraint_count() const {
    return 6 * np_ + np_ + 6 * nc_ + 6 * std::max(0, nc_ - 1);
  }

  JointVelocity input(const Eigen::VectorXd& z, int block) const {
    return z.segment<3>(3 * block);
  }
  JointVelocity step_input(const Eigen::VectorXd& z, int k) const {
    return input(z, std::min(k, nc_ - 1));
  }

  void rollout(const Eigen::VectorXd& z) {
    q_[0] = x0_.joints;
    for (int k = 0; k < np_; ++k) {
      q_[k + 1] = q_[k] + cfg_.sample_time * step_input(z, k);
    }
    for (int k = 0; k <= np_; ++k) frames_[k] = robot::chain_frames(q_[k], geom_);
  }

  // Objective of the horizon (no constraint terms). When grad is non-null it
  // receives d/dz; grad_q_ is left holding the direct state gradients.
  double objective(const Eigen::VectorXd& z, Eigen::VectorXd* grad,
                   bool* out_of_map) {
    rollout(z);
    const bool want_grad = grad != nullptr;
    if (want_grad) {
      grad->setZero(variable_count());
      for (auto& g : grad_q_) g.setZero();
    }
    const double alpha = cfg_.blend;
    const Eigen::Vector3d& w = params_.tracking_weights;
    double total = 0.0;

    for (int k = 0; k < nc_; ++k) {
      const robot::ChainFrames& f = frames_[k];
      const JointVelocity u = input(z, k);
      const Eigen::Vector3d e = ee_twist(f, rail_dir_, u) - reference_;
      const Eigen::Vector3d we = w.cwiseProduct(e);
      total += alpha * e.dot(we);
      if (want_grad) {
        // J^T (Q e): columns of J are (rail_dir, 0), (perp(p - o1), 1),
        // (perp(p - o2), 1).
        const Eigen::Vector2d a = f.tool - f.carriage;
        const Eigen::Vector2d b = f.tool - f.elbow;
        Eigen::Vector3d jt;
        jt[0] = rail_dir_.dot(we.head<2>());
        jt[1] = -a.y() * we[0] + a.x() * we[1] + we[2];
        jt[2] = -b.y() * we[0] + b.x() * we[1] + we[2];
        grad->segment<3>(3 * k) += 2.0 * alpha * jt;
        grad_q_[k] += 2.0 * alpha *
                      twist_jacobian_wrt_q(f, u).transpose() * we.head<2>();
      }
    }

    const double beta = 1.0 - alpha;
    bool outside = false;
    if (beta != 0.0) {
      for (int k = 1; k <= np_; ++k) {
        const robot::ChainFrames& f = frames_[k];
        const robot::SphereCenters centers = robot::sphere_centers(f, geom_);
        std::array<Eigen::Matrix<double, 2, 3>, kSphereCount> jac;
        if (want_grad) jac = robot::sphere_center_jacobians(f, centers, geom_);
        for (int m = 0; m < kSphereCount; ++m) {
          Eigen::Vector2d sd_grad;
          const world::DistanceQuery dq =
              esdf_.signed_distance(centers[m], want_grad ? &sd_grad : nullptr);
          outside = outside || dq.out_of_map;
          const PenaltyValue pv =
              penalty_with_slope(dq.distance, params_.penalty_scale,
                                 params_.penalty_steepness, cfg_.clearance);
          total += beta * pv.value;
          if (want_grad && pv.slope != 0.0) {
            grad_q_[k] += beta * pv.slope * (jac[m].transpose() * sd_grad);
          }
        }
      }
    }
    if (out_of_map != nullptr) *out_of_map = outside;
    return total;
  }

  // Visits every scaled constraint g <= 0 in a fixed order. The visitor gets
  // (index, g, physical violation, kind, gradient-scatter callback).
  template <typename Visitor>
  void for_each_constraint(const Eigen::VectorXd& z, Visitor&& visit) {
    const auto& lim = cfg_.limits;
    const double ts = cfg_.sample_time;
    int idx = 0;

    // Joint position bounds along the roll-out (states 1..Np).
    for (int k = 1; k <= np_; ++k) {
      for (int i = 0; i < 3; ++i) {
        const double upper = q_[k][i] - lim.position_max[i];
        const double lower = lim.position_min[i] - q_[k][i];
        visit(idx++, upper, upper, [&](double c, Eigen::VectorXd&) {
          grad_q_[k][i] += c;
        });
        visit(idx++, lower, lower, [&](double c, Eigen::VectorXd&) {
          grad_q_[k][i] -= c;
        });
      }
    }

    // End-effector planar speed along the horizon (states 0..Np-1).
    const double v2 = lim.ee_speed_max * lim.ee_speed_max;
    for (int k = 0; k < np_; ++k) {
      const int block = std::min(k, nc_ - 1);
      const JointVelocity u = input(z, block);
      const robot::ChainFrames& f = frames_[k];
      const Eigen::Vector2d v = ee_twist(f, rail_dir_, u).head<2>();
      const double g = (v.squaredNorm() - v2) / v2;
      visit(idx++, g, v.norm() - lim.ee_speed_max,
            [&, k, block, v](double c, Eigen::VectorXd& grad) {
              const double s = 2.0 * c / v2;
              const Eigen::Vector2d a = f.tool - f.carriage;
              const Eigen::Vector2d b = f.tool - f.elbow;
              Eigen::Vector3d ju;
              ju[0] = rail_dir_.dot(v);
              ju[1] = -a.y() * v.x() + a.x() * v.y();
              ju[2] = -b.y() * v.x() + b.x() * v.y();
              grad.segment<3>(3 * block) += s * ju;
              grad_q_[k] += s * (twist_jacobian_wrt_q(f, u).transpose() * v);
            });
    }

    // Acceleration on successive input differences, anchored at u_prev.
    for (int k = 0; k < nc_; ++k) {
      const JointVelocity prev = k == 0 ? u_prev_ : input(z, k - 1);
      const JointVelocity acc = (input(z, k) - prev) / ts;
      for (int i = 0; i < 3; ++i) {
        const double amax = lim.acceleration_max[i];
        const double up = (acc[i] - amax) / amax;
        const double lo = (-acc[i] - amax) / amax;
        auto scatter = [&, k, i, amax](double sign) {
          return [&, k, i, amax, sign](double c, Eigen::VectorXd& grad) {
            const double d = sign * c / (amax * ts);
            grad[3 * k + i] += d;
            if (k > 0) grad[3 * (k - 1) + i] -= d;
          };
        };
        visit(idx++, up, acc[i] - amax, scatter(1.0));
        visit(idx++, lo, -acc[i] - amax, scatter(-1.0));
      }
    }

    // Jerk on second differences, anchored at u_prev (k >= 1).
    for (int k = 1; k < nc_; ++k) {
      const JointVelocity before = k == 1 ? u_prev_ : input(z, k - 2);
      const JointVelocity jerk =
          (input(z, k) - 2.0 * input(z, k - 1) + before) / (ts * ts);
      for (int i = 0; i < 3; ++i) {
        const double jmax = lim.jerk_max[i];
        const double up = (jerk[i] - jmax) / jmax;
        const double lo = (-jerk[i] - jmax) / jmax;
        auto scatter = [&, k, i, jmax](double sign) {
          return [&, k, i, jmax, sign](double c, Eigen::VectorXd& grad) {
            const double d = sign * c / (jmax * ts * ts);
            grad[3 * k + i] += d;
            grad[3 * (k - 1) + i] -= 2.0 * d;
            if (k >= 2) grad[3 * (k - 2) + i] += d;
          };
        };
        visit(idx++, up, jerk[i] - jmax, scatter(1.0));
        visit(idx++, lo, -jerk[i] - jmax, scatter(-1.0));
      }
    }
  }

  // Pushes the accumulated state gradients back onto the inputs.
  void backpropagate_states(Eigen::VectorXd& grad) const {
    Eigen::Vector3d suffix = Eigen::Vector3d::Zero();
    for (int k = np_ - 1; k >= 0; --k) {
      suffix += grad_q_[k + 1];
      grad.segment<3>(3 * std::min(k, nc_ - 1)) += cfg_.sample_time * suffix;
    }
  }

  double augmented(const Eigen::VectorXd& z, Eigen::VectorXd& grad,
                   const std::vector<double>& multipliers, double rho) {
    double value = objective(z, &grad, nullptr);
    for_each_constraint(z, [&](int idx, double g, double, auto&& scatter) {
      const double lambda = multipliers[static_cast<std::size_t>(idx)];
      const double shifted = std::max(0.0, lambda + rho * g);
      if (shifted > 0.0 || lambda > 0.0) {
        value += (shifted * shifted - lambda * lambda) / (2.0 * rho);
      }
      if (shifted > 0.0) scatter(shifted, grad);
    });
    backpropagate_states(grad);
    return value;
  }

  double gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    const double value = objective(z, &grad, nullptr);
    backpropagate_states(grad);
    return value;
  }

  const std::vector<JointVector>& states() const { return q_; }

 private:
  const RobotState& x0_;
  const Twist& reference_;
  const MpcParams& params_;
  const ControllerConfig& cfg_;
  const robot::RobotGeometry& geom_;
  const world::Esdf& esdf_;
  JointVelocity u_prev_;
  int np_;
  int nc_;
  Eigen::Vector2d rail_dir_;
  std::vector<JointVector> q_;
  std::vector<robot::ChainFrames> frames_;  // of q_, refreshed by rollout
  std::vector<Eigen::Vector3d> grad_q_;
};

Eigen::VectorXd flatten(const std::vector<JointVelocity>& inputs) {
  Eigen::VectorXd z(3 * static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    z.segment<3>(3 * static_cast<Eigen::Index>(k)) = inputs[k];
  }
  return z;
}

std::vector<JointVelocity> unflatten(const Eigen::VectorXd& z) {
  std::vector<JointVelocity> out(static_cast<std::size_t>(z.size() / 3));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = z.segment<3>(3 * static_cast<Eigen::Index>(k));
  }
  return out;
}

void check_input_count(const std::vector<JointVelocity>& inputs,
                       const MpcParams& params) {
  if (static_cast<int>(inputs.size()) != params.control_horizon) {
    throw std::invalid_argument("input sequence must have Nc entries");
  }
}

}  // namespace

void MpcParams::validate() const {
  if (control_horizon < 1 || prediction_horizon < control_horizon) {
    throw std::invalid_argument("MPC horizons must satisfy Np >= Nc >= 1");
  }
  if ((tracking_weights.array() <= 0.0).any() || !(penalty_scale > 0.0) ||
      !(penalty_steepness > 0.0)) {
    throw std::invalid_argument("MPC weights and penalty scales must be positive");
  }
}

void ControllerConfig::validate() const {
  if (!(blend >= 0.0 && blend <= 1.0)) {
    throw std::invalid_argument("blend must lie in [0, 1]");
  }
  if (!(sample_time > 0.0)) throw std::invalid_argument("sample time must be positive");
  if (!(clearance > 0.0)) throw std::invalid_argument("clearance must be positive");
  limits.validate();
}

double ConstraintReport::max_soft() const {
  return std::max({position, acceleration, jerk, ee_speed});
}

double tracking_cost(const RobotState& x, const JointVelocity& u,
                     const Twist& reference, const Eigen::Vector3d& weights,
                     const robot::RobotGeometry& geom) {
  const Eigen::Vector3d e = robot::jacobian(x.joints, geom) * u - reference;
  return e.dot(weights.cwiseProduct(e));
}

double obstacle_penalty(double signed_distance, double scale, double steepness,
                        double clearance) {
  const double z =
      std::clamp(steepness * (signed_distance - clearance), -kMaxExponent, kMaxExponent);
  return scale / (1.0 + std::exp(z));
}

HorizonCost horizon_cost(const RobotState& x0,
                         const std::vector<JointVelocity>& inputs,
                         const Twist& reference, const MpcParams& params,
                         const ControllerConfig& cfg,
                         const robot::RobotGeometry& geom,
                         const world::Esdf& esdf) {
  check_input_count(inputs, params);
  const JointVelocity zero = JointVelocity::Zero();
  HorizonProblem problem(x0, reference, params, cfg, geom, esdf, zero);
  HorizonCost out;
  out.value = problem.objective(flatten(inputs), nullptr, &out.out_of_map);
  return out;
}

double horizon_cost_gradient(const RobotState& x0,
                             const std::vector<JointVelocity>& inputs,
                             const Twist& reference, const MpcParams& params,
                             const ControllerConfig& cfg,
                             const robot::RobotGeometry& geom,
                             const world::Esdf& esdf, Eigen::VectorXd& grad) {
  check_input_count(inputs, params);
  const JointVelocity zero = JointVelocity::Zero();
  HorizonProblem problem(x0, reference, params, cfg, geom, esdf, zero);
  return problem.gradient(flatten(inputs), grad);
}

ConstraintReport check_constraints(const RobotState& x0,
                                   const std::vector<JointVelocity>& inputs,
                                   const JointVelocity& u_prev,
                                   const MpcParams& params,
                                   const ControllerConfig& cfg,
                                   const robot::RobotGeometry& geom) {
  check_input_count(inputs, params);
  const auto& lim = cfg.limits;
  const int np = params.prediction_horizon;
  const int nc = params.control_horizon;
  const double ts = cfg.sample_time;
  ConstraintReport r;

  for (const auto& u : inputs) {
    r.velocity = std::max(r.velocity,
                          (u.cwiseAbs() - lim.velocity_max).maxCoeff());
  }
  JointVector q = x0.joints;
  for (int k = 0; k < np; ++k) {
    const JointVelocity& u = blocked_input(inputs, k);
    const Eigen::Vector3d twist = robot::jacobian(q, geom) * u;
    r.ee_speed = std::max(r.ee_speed, twist.head<2>().norm() - lim.ee_speed_max);
    q += ts * u;
    r.position = std::max(
        r.position, std::max((q - lim.position_max).maxCoeff(),
                             (lim.position_min - q).maxCoeff()));
  }
  for (int k = 0; k < nc; ++k) {
    const JointVelocity prev = k == 0 ? u_prev : inputs[k - 1];
    const JointVelocity acc = (inputs[k] - prev) / ts;
    r.acceleration = std::max(r.acceleration,
                              (acc.cwiseAbs() - lim.acceleration_max).maxCoeff());
    if (k >= 1) {
      const JointVelocity before = k == 1 ? u_prev : inputs[k - 2];
      const JointVelocity jerk = (inputs[k] - 2.0 * inputs[k - 1] + before) / (ts * ts);
      r.jerk = std::max(r.jerk, (jerk.cwiseAbs() - lim.jerk_max).maxCoeff());
    }
  }
  r.velocity = std::max(0.0, r.velocity);
  r.position = std::max(0.0, r.position);
  r.acceleration = std::max(0.0, r.acceleration);
  r.jerk = std::max(0.0, r.jerk);
  r.ee_speed = std::max(0.0, r.ee_speed);
  return r;
}

ControlResult solve_mpc(const RobotState& x0, const Twist& reference,
                        const MpcParams& params, const ControllerConfig& cfg,
                        const robot::RobotGeometry& geom,
                        const world::Esdf& esdf,
                        const std::optional<std::vector<JointVelocity>>& warm_start,
                        const JointVelocity& u_prev, bool warm_start_feasible,
                        const std::vector<double>* multiplier_warm_start) {
  params.validate();
  const int nc = params.control_horizon;
  HorizonProblem problem(x0, reference, params, cfg, geom, esdf, u_prev);
  const int n = problem.variable_count();

  Eigen::VectorXd lower(n);
  Eigen::VectorXd upper(n);
  for (int k = 0; k < nc; ++k) {
    upper.segment<3>(3 * k) = cfg.limits.velocity_max;
    lower.segment<3>(3 * k) = -cfg.limits.velocity_max;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  if (warm_start && static_cast<int>(warm_start->size()) == nc) {
    z = flatten(*warm_start);
  }

  ControlResult result;
  std::vector<double> multipliers(
      static_cast<std::size_t>(problem.constraint_count()), 0.0);
  if (multiplier_warm_start != nullptr &&
      multiplier_warm_start->size() == multipliers.size()) {
    multipliers = *multiplier_warm_start;
  }
  double rho = cfg.solver.initial_penalty;
  numerics::BoxLbfgsOptions opts;
  opts.max_iterations = cfg.solver.max_inner_iterations;
  opts.memory = cfg.solver.lbfgs_memory;
  opts.gradient_tolerance = cfg.solver.gradient_tolerance;
  opts.initial_step = cfg.solver.initial_step;

  double violation = 0.0;
  for (int outer = 0; outer < cfg.solver.max_outer_iterations; ++outer) {
    const auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      return problem.augmented(x, g, multipliers, rho);
    };
    const numerics::BoxLbfgsResult inner =
        numerics::minimize_box(fn, z, lower, upper, opts);
    z = inner.x;
    result.solve_iterations += inner.iterations;
    result.cost_evaluations += inner.evaluations;
    result.outer_iterations = outer + 1;

    problem.rollout(z);
    violation = 0.0;
    problem.for_each_constraint(z, [&](int idx, double g, double physical, auto&&) {
      violation = std::max(violation, physical);
      double& lambda = multipliers[static_cast<std::size_t>(idx)];
      lambda = std::max(0.0, lambda + rho * g);
    });
    if (violation <= cfg.solver.residual_tolerance) break;
    rho = std::min(rho * cfg.solver.penalty_growth, cfg.solver.max_penalty);
  }

  result.inputs = unflatten(z);
  result.multipliers = std::move(multipliers);
  bool out_of_map = false;
  result.cost = problem.objective(z, nullptr, &out_of_map);
  ++result.cost_evaluations;
  result.out_of_map = out_of_map;
  const ConstraintReport report =
      check_constraints(x0, result.inputs, u_prev, params, cfg, geom);
  result.max_residual = std::max(report.max_soft(), violation);
  result.feasible = std::isfinite(result.cost) && z.allFinite() &&
                    report.velocity <= 1e-6 &&
                    report.max_soft() <= cfg.solver.residual_tolerance;
  if (result.feasible) {
    result.u0 = result.inputs.front();
  } else if (warm_start && warm_start_feasible && !warm_start->empty()) {
    result.u0 = warm_start->front();
  } else {
    result.u0.setZero();
  }
  return result;
}

std::vector<double> shift_multipliers(const std::vector<double>& multipliers,
                                      const MpcParams& params) {
  const int np = params.prediction_horizon;
  const int nc = params.control_horizon;
  // (steps, entries per step) in the order constraints are visited.
  const std::array<std::pair<int, int>, 4> groups = {
      {{np, 6}, {np, 1}, {nc, 6}, {std::max(0, nc - 1), 6}}};
  std::size_t expected = 0;
  for (const auto& [steps, width] : groups) expected += std::size_t(steps * width);
  if (multipliers.size() != expected) return {};

  std::vector<double> out(multipliers.size());
  std::size_t base = 0;
  for (const auto& [steps, width] : groups) {
    for (int k = 0; k < steps; ++k) {
      const int from = std::min(k + 1, steps - 1);
      for (int e = 0; e < width; ++e) {
        out[base + std::size_t(k * width + e)] = multipliers[base + std::size_t(from * width + e)];
      }
    }
    base += std::size_t(steps * width);
  }
  return out;
}

SharedController::SharedController(MpcParams params, ControllerConfig cfg,
                                   robot::RobotGeometry geom,
                                   const world::Esdf& esdf)
    : params_(std::move(params)),
      cfg_(std::move(cfg)),
      geom_(std::move(geom)),
      esdf_(&esdf) {
  params_.validate();
  cfg_.validate();
  geom_.validate();
}

SharedController::Step SharedController::step(const RobotState& x,
                                              const Twist& reference) {
  Step out;
  out.result = solve_mpc(x, reference, params_, cfg_, geom_, *esdf_, warm_start_,
                         last_applied_, warm_start_feasible_, &multipliers_);
  out.applied = out.result.feasible ? out.result.u0 : last_applied_;
  last_applied_ = out.applied;

  std::vector<JointVelocity> shifted(out.result.inputs.begin() + 1,
                                     out.result.inputs.end());
  shifted.push_back(out.result.inputs.back());
  warm_start_ = std::move(shifted);
  warm_start_feasible_ = out.result.feasible;
  multipliers_ = shift_multipliers(out.result.multipliers, params_);
  return out;
}

void SharedController::reset() {
  warm_start_.reset();
  warm_start_feasible_ = false;
  multipliers_.clear();
  last_applied_.setZero();
}

void to_json(nlohmann::json& j, const MpcParams& p) {
  j = {{"Np", p.prediction_horizon},
       {"Nc", p.control_horizon},
       {"Qx", p.tracking_weights.x()},
       {"Qy", p.tracking_weights.y()},
       {"Qtheta", p.tracking_weights.z()},
       {"c1", p.penalty_scale},
       {"c2", p.penalty_steepness}};
}

void from_json(const nlohmann::json& j, MpcParams& p) {
  p.prediction_horizon = j.at("Np").get<int>();
  p.control_horizon = j.at("Nc").get<int>();
  p.tracking_weights = {j.at("Qx").get<double>(), j.at("Qy").get<double>(),
                        j.at("Qtheta").get<double>()};
  p.penalty_scale = j.at("c1").get<double>();
  p.penalty_steepness = j.at("c2").get<double>();
  p.validate();
}

void to_json(nlohmann::json& j, const ControllerConfig& c) {
  j = {{"blend", c.blend},
       {"sample_time", c.sample_time},
       {"clearance", c.clearance},
       {"limits", c.limits},
       {"solver",
        {{"max_inner_iterations", c.solver.max_inner_iterations},
         {"max_outer_iterations", c.solver.max_outer_iterations},
         {"lbfgs_memory", c.solver.lbfgs_memory},
         {"initial_penalty", c.solver.initial_penalty},
         {"penalty_growth", c.solver.penalty_growth},
         {"max_penalty", c.solver.max_penalty},
         {"gradient_tolerance", c.solver.gradient_tolerance},
         {"initial_step", c.solver.initial_step},
         {"residual_tolerance", c.solver.residual_tolerance}}}};
}

void from_json(const nlohmann::json& j, ControllerConfig& c) {
  c = ControllerConfig{};
  c.blend = j.value("blend", c.blend);
  c.sample_time = j.value("sample_time", c.sample_time);
  c.clearance = j.value("clearance", c.clearance);
  if (j.contains("limits")) c.limits = j.at("limits").get<robot::JointLimits>();
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    auto& d = c.solver;
    d.max_inner_iterations = s.value("max_inner_iterations", d.max_inner_iterations);
    d.max_outer_iterations = s.value("max_outer_iterations", d.max_outer_iterations);
    d.lbfgs_memory = s.value("lbfgs_memory", d.lbfgs_memory);
    d.initial_penalty = s.value("initial_penalty", d.initial_penalty);
    d.penalty_growth = s.value("penalty_growth", d.penalty_growth);
    d.max_penalty = s.value("max_penalty", d.max_penalty);
    d.gradient_tolerance = s.value("gradient_tolerance", d.gradient_tolerance);
    d.initial_step = s.value("initial_step", d.initial_step);
    d.residual_tolerance = s.value("residual_tolerance", d.residual_tolerance);
  }
  c.validate();
}

}  // namespace sctune::controller
