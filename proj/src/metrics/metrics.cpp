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

#include "sctune/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sctune::metrics {
namespace {

void require_samples(const Trajectory& traj, std::size_t n, const char* what) {
  if (traj.samples.size() < n) {
    throw std::invalid_argument(std::string(what) + ": trajectory too short");
  }
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

int sign_of(double a, double deadband) {
  if (a > deadband) return 1;
  if (a < -deadband) return -1;
  return 0;
}

}  // namespace

double TrajectorySample::min_distance() const {
  return *std::min_element(sphere_distances.begin(), sphere_distances.end());
}

double obstacle_proximity(const Trajectory& traj) {
  require_samples(traj, 1, "obstacle proximity");
  double best = traj.samples.front().min_distance();
  for (const auto& s : traj.samples) best = std::min(best, s.min_distance());
  return best;
}

double time_near_obstacles(const Trajectory& traj, double d_safe) {
  require_samples(traj, 1, "time near obstacles");
  if (!(traj.duration > 0.0)) {
    throw std::invalid_argument("time near obstacles: duration must be positive");
  }
  const auto& s = traj.samples;
  const double end = s.front().t + traj.duration;
  double near = 0.0;
  for (std::size_t g = 0; g < s.size(); ++g) {
    if (s[g].min_distance() > d_safe) continue;
    const double next = g + 1 < s.size() ? s[g + 1].t : end;
    near += next - s[g].t;
  }
  return std::clamp(100.0 * near / traj.duration, 0.0, 100.0);
}

double path_length(const Trajectory& traj) {
  double total = 0.0;
  for (std::size_t g = 1; g < traj.samples.size(); ++g) {
    total += (traj.samples[g].state.ee.position() -
              traj.samples[g - 1].state.ee.position())
                 .norm();
  }
  return total;
}

double path_smoothness(const Trajectory& traj, double stationary_path) {
  require_samples(traj, 3, "path smoothness");
  const auto& s = traj.samples;
  const double length = path_length(traj);
  if (length < stationary_path) return 0.0;
  double sum = 0.0;
  for (std::size_t g = 1; g + 1 < s.size(); ++g) {
    const Eigen::Vector2d d0 = s[g].state.ee.position() - s[g - 1].state.ee.position();
    const Eigen::Vector2d d1 = s[g + 1].state.ee.position() - s[g].state.ee.position();
    sum += (d1 - d0).squaredNorm();
  }
  return sum / length;
}

CurvatureChange curvature_change(const Trajectory& traj, double min_speed) {
  CurvatureChange out;
  const auto& s = traj.samples;
  std::vector<double> kappa;
  for (std::size_t g = 0; g + 1 < s.size(); ++g) {
    const double dt = s[g + 1].t - s[g].t;
    const double v =
        (s[g + 1].state.ee.position() - s[g].state.ee.position()).norm() / dt;
    if (v < min_speed) continue;
    const double omega = wrap_angle(s[g + 1].state.ee.theta - s[g].state.ee.theta) / dt;
    kappa.push_back(std::abs(omega / v));
  }
  const double length = path_length(traj);
  if (kappa.size() < 3 || length <= 0.0) {
    out.degenerate = true;
    return out;
  }
  double total = 0.0;
  for (std::size_t i = 1; i < kappa.size(); ++i) {
    total += std::abs(kappa[i] - kappa[i - 1]);
  }
  out.value = total / length;
  return out;
}

double velocity_smoothness(const Trajectory& traj, double accel_deadband) {
  require_samples(traj, 3, "velocity smoothness");
  const auto& s = traj.samples;
  const std::size_t n_acc = s.size() - 1;
  double per_joint_sum = 0.0;
  for (int joint = 0; joint < 3; ++joint) {
    std::vector<int> signs(n_acc);
    for (std::size_t g = 0; g < n_acc; ++g) {
      const double a =
          (s[g + 1].applied[joint] - s[g].applied[joint]) / (s[g + 1].t - s[g].t);
      signs[g] = sign_of(a, accel_deadband);
    }
    double crossings = 0.0;
    for (std::size_t g = 1; g < n_acc; ++g) {
      crossings += std::abs(signs[g] - signs[g - 1]);
    }
    per_joint_sum += crossings / static_cast<double>(n_acc - 1);
  }
  return per_joint_sum / 3.0;
}

double avg_computation_time(const Trajectory& traj) {
  require_samples(traj, 1, "computation time");
  double total = 0.0;
  for (const auto& s : traj.samples) total += s.solve_time;
  return 1000.0 * total / static_cast<double>(traj.samples.size());
}

MetricVector evaluate_metrics(const Trajectory& traj, const MetricOptions& opts) {
  MetricVector m;
  m.d_ob = obstacle_proximity(traj);
  m.t_ob = time_near_obstacles(traj, opts.d_safe);
  m.f_ps = path_smoothness(traj, opts.stationary_path);
  m.f_cc = curvature_change(traj, opts.min_speed).value;
  m.f_vs = velocity_smoothness(traj, opts.accel_deadband);
  m.t_c = avg_computation_time(traj);
  return m;
}

void MetricWeights::validate() const {
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw std::invalid_argument("metric weights must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("metric weights must sum to 1");
  }
}

double normalized_objective(const MetricVector& m, const MetricWeights& weights,
                            const NormalizationSpec& norms) {
  for (double v : m.as_array()) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite metric");
  }
  const auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const std::array<double, 6> normalized = {
      unit((norms.d_ref - std::min(m.d_ob, norms.d_ref)) / norms.d_ref),
      unit(m.t_ob / norms.t_ob_ref),
      unit(m.f_ps / norms.f_ps_ref),
      unit(m.f_cc / norms.f_cc_ref),
      unit(m.f_vs / norms.f_vs_ref),
      unit(m.t_c / norms.t_c_ref),
  };
  double j = 0.0;
  for (std::size_t h = 0; h < normalized.size(); ++h) j += weights.w[h] * normalized[h];
  return j;
}

void to_json(nlohmann::json& j, const MetricVector& m) {
  j = {{"d_ob", m.d_ob}, {"t_ob", m.t_ob}, {"f_ps", m.f_ps},
       {"f_cc", m.f_cc}, {"f_vs", m.f_vs}, {"t_C", m.t_c}};
}

void from_json(const nlohmann::json& j, MetricVector& m) {
  m.d_ob = j.at("d_ob").get<double>();
  m.t_ob = j.at("t_ob").get<double>();
  m.f_ps = j.at("f_ps").get<double>();
  m.f_cc = j.at("f_cc").get<double>();
  m.f_vs = j.at("f_vs").get<double>();
  m.t_c = j.at("t_C").get<double>();
}

void to_json(nlohmann::json& j, const MetricWeights& w) { j = w.w; }

void from_json(const nlohmann::json& j, MetricWeights& w) {
  if (j.is_object()) {
    for (std::size_t h = 0; h < kMetricNames.size(); ++h) {
      w.w[h] = j.at(kMetricNames[h]).get<double>();
    }
  } else {
    w.w = j.get<std::array<double, 6>>();
  }
  w.validate();
}

void to_json(nlohmann::json& j, const NormalizationSpec& n) {
  j = {{"d_ref", n.d_ref},       {"t_ob_ref", n.t_ob_ref}, {"f_ps_ref", n.f_ps_ref},
       {"f_cc_ref", n.f_cc_ref}, {"f_vs_ref", n.f_vs_ref}, {"t_C_ref", n.t_c_ref}};
}

void from_json(const nlohmann::json& j, NormalizationSpec& n) {
  n = NormalizationSpec{};
  n.d_ref = j.value("d_ref", n.d_ref);
  n.t_ob_ref = j.value("t_ob_ref", n.t_ob_ref);
  n.f_ps_ref = j.value("f_ps_ref", n.f_ps_ref);
  n.f_cc_ref = j.value("f_cc_ref", n.f_cc_ref);
  n.f_vs_ref = j.value("f_vs_ref", n.f_vs_ref);
  n.t_c_ref = j.value("t_C_ref", n.t_c_ref);
}

void to_json(nlohmann::json& j, const MetricOptions& o) {
  j = {{"d_safe", o.d_safe},
       {"min_speed", o.min_speed},
       {"stationary_path", o.stationary_path},
       {"accel_deadband", o.accel_deadband}};
}

void from_json(const nlohmann::json& j, MetricOptions& o) {
  o = MetricOptions{};
  o.d_safe = j.value("d_safe", o.d_safe);
  o.min_speed = j.value("min_speed", o.min_speed);
  o.stationary_path = j.value("stationary_path", o.stationary_path);
  o.accel_deadband = j.value("accel_deadband", o.accel_deadband);
}

}  // namespace sctune::metrics
