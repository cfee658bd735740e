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

#include "sctune/harness/teleop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sctune::harness {
namespace {

using nlohmann::json;

double finite_number(const json& msg, const char* key) {
  const auto it = msg.find(key);
  if (it == msg.end() || !it->is_number()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("field '") + key + "' is not finite");
  return v;
}

std::string dump(const json& j) { return j.dump(); }

}  // namespace

std::string error_frame(const std::string& msg) {
  return dump({{"type", "error"}, {"msg", msg}});
}

bool clamp_twist(robot::Twist& twist, double v_max, double omega_max) {
  bool clamped = false;
  const double speed = std::hypot(twist[0], twist[1]);
  // Slack so that commands at exactly v_max survive rounding untouched.
  if (speed > v_max * (1.0 + 1e-12)) {
    const double s = v_max / speed;
    twist[0] *= s;
    twist[1] *= s;
    clamped = true;
  }
  if (std::abs(twist[2]) > omega_max) {
    twist[2] = std::copysign(omega_max, twist[2]);
    clamped = true;
  }
  return clamped;
}

TeleopSession::TeleopSession(std::uint64_t id, sim::SimContext ctx,
                             std::map<std::string, controller::MpcParams> conditions,
                             TeleopOptions options)
    : id_(id),
      ctx_(std::move(ctx)),
      conditions_(std::move(conditions)),
      options_(options),
      clock_(ctx_.clock.make()) {
  if (ctx_.esdf == nullptr) throw std::invalid_argument("teleop session needs an ESDF");
  if (conditions_.empty()) throw std::invalid_argument("teleop session needs a parameter set");
  if (!(options_.v_max > 0.0) || !(options_.omega_max >= 0.0)) {
    throw std::invalid_argument("teleop clamps must be positive");
  }
  for (const auto& [name, params] : conditions_) params.validate();
  if (conditions_.count(condition_) == 0) condition_ = conditions_.begin()->first;
  state_ = robot::make_state(options_.home, ctx_.geometry);
}

TeleopSession::Reply TeleopSession::handle_message(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return {{error_frame("malformed JSON")}, std::nullopt};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string()) {
    return {{error_frame("frame needs a string 'type'")}, std::nullopt};
  }
  const std::string type = msg.at("type").get<std::string>();
  try {
    if (type == "cmd") {
      robot::Twist twist(finite_number(msg, "vx"), finite_number(msg, "vy"),
                         finite_number(msg, "omega"));
      reference_clamped_ = clamp_twist(twist, options_.v_max, options_.omega_max);
      reference_ = twist;
      return {};
    }
    if (type == "episode") {
      const auto action = msg.find("action");
      if (action == msg.end() || !action->is_string()) {
        return {{error_frame("episode frame needs an 'action'")}, std::nullopt};
      }
      if (*action == "start") return start_episode(msg);
      if (*action == "end") return end_episode();
      return {{error_frame("unknown episode action '" + action->get<std::string>() + "'")},
              std::nullopt};
    }
  } catch (const std::exception& e) {
    return {{error_frame(e.what())}, std::nullopt};
  }
  return {{error_frame("unknown frame type '" + type + "'")}, std::nullopt};
}

TeleopSession::Reply TeleopSession::start_episode(const json& msg) {
  if (status_ == Status::kActive) {
    return {{error_frame("episode already active")}, std::nullopt};
  }
  std::string condition = condition_;
  if (msg.contains("condition")) {
    if (!msg.at("condition").is_string()) {
      return {{error_frame("condition must be a string")}, std::nullopt};
    }
    condition = msg.at("condition").get<std::string>();
    if (conditions_.count(condition) == 0) {
      return {{error_frame("unknown condition '" + condition + "'")}, std::nullopt};
    }
  }
  robot::JointVector q0 = options_.home;
  if (msg.contains("q0")) {
    const json& q = msg.at("q0");
    if (!q.is_array() || q.size() != 3) {
      return {{error_frame("q0 must hold three joint values")}, std::nullopt};
    }
    for (int i = 0; i < 3; ++i) {
      if (!q[static_cast<std::size_t>(i)].is_number()) {
        return {{error_frame("q0 must hold three joint values")}, std::nullopt};
      }
      q0[i] = q[static_cast<std::size_t>(i)].get<double>();
    }
    if (!q0.allFinite() || !ctx_.controller.limits.within_position(q0)) {
      return {{error_frame("q0 outside the joint limits")}, std::nullopt};
    }
  }
  condition_ = condition;
  controller_.emplace(conditions_.at(condition_), ctx_.controller, ctx_.geometry, *ctx_.esdf);
  state_ = robot::make_state(q0, ctx_.geometry);
  reference_ = robot::Twist::Zero();
  reference_clamped_ = false;
  last_feasible_ = true;
  time_ = 0.0;
  ticks_ = 0;
  infeasible_solves_ = 0;
  trajectory_ = {};
  status_ = Status::kActive;
  ++episode_;
  return {{state_frame()}, std::nullopt};
}

TeleopSession::Reply TeleopSession::end_episode() {
  if (status_ != Status::kActive) return {{error_frame("no active episode")}, std::nullopt};
  EpisodeRecord record;
  record.session_id = id_;
  record.episode = episode_;
  record.condition = condition_;
  record.params = conditions_.at(condition_);
  trajectory_.duration = ticks_ * ctx_.controller.sample_time;
  record.trajectory = std::move(trajectory_);
  record.infeasible_solves = infeasible_solves_;
  trajectory_ = {};
  controller_.reset();
  status_ = Status::kIdle;
  return {{}, std::move(record)};
}

std::string TeleopSession::tick() {
  if (status_ == Status::kActive) {
    const double ts = ctx_.controller.sample_time;
    const controller::MpcParams& params = conditions_.at(condition_);
    clock_->start();
    const controller::SharedController::Step step = controller_->step(state_, reference_);
    const double solve_time = clock_->stop(step.result, params);

    metrics::TrajectorySample sample;
    sample.t = time_;
    sample.state = state_;
    sample.applied = step.applied;
    sample.solve_time = solve_time;
    sample.feasible = step.result.feasible;
    const robot::SphereCenters centers = robot::sphere_centers(state_.joints, ctx_.geometry);
    for (int m = 0; m < robot::kSphereCount; ++m) {
      sample.sphere_distances[m] = ctx_.esdf->signed_distance(centers[m]).distance;
    }
    trajectory_.samples.push_back(sample);
    if (!step.result.feasible) ++infeasible_solves_;
    last_feasible_ = step.result.feasible;

    state_ = robot::step_kinematics(state_, step.applied, ts, ctx_.geometry);
    ++ticks_;
    time_ = ticks_ * ts;
  }
  return state_frame();
}

std::string TeleopSession::state_frame() const {
  const robot::SphereCenters centers = robot::sphere_centers(state_.joints, ctx_.geometry);
  json spheres = json::array();
  double min_sd = std::numeric_limits<double>::infinity();
  for (const auto& c : centers) {
    spheres.push_back({c.x(), c.y()});
    min_sd = std::min(min_sd, ctx_.esdf->signed_distance(c).distance);
  }
  json frame = {{"type", "state"},
                {"t", time_},
                {"ee", {state_.ee.x, state_.ee.y, state_.ee.theta}},
                {"q", {state_.joints[0], state_.joints[1], state_.joints[2]}},
                {"spheres", std::move(spheres)},
                {"min_sd", min_sd},
                {"feasible", last_feasible_}};
  if (reference_clamped_) frame["clamped"] = true;
  return dump(frame);
}

std::string metrics_frame(const EpisodeRecord& record, const sim::SimContext& ctx) {
  json frame = {{"type", "metrics"}};
  const std::size_t n = record.trajectory.samples.size();
  metrics::MetricVector m;
  double objective = 0.0;
  if (n > 0) {
    m = metrics::evaluate_metrics(record.trajectory, ctx.metric_options);
    objective = metrics::normalized_objective(m, ctx.weights, ctx.normalization);
  }
  const auto values = m.as_array();
  for (std::size_t h = 0; h < values.size(); ++h) frame[metrics::kMetricNames[h]] = values[h];
  frame["objective"] = objective;
  frame["condition"] = record.condition;
  frame["episode"] = record.episode;
  frame["samples"] = n;
  frame["infeasible_fraction"] =
      n > 0 ? static_cast<double>(record.infeasible_solves) / static_cast<double>(n) : 0.0;
  return dump(frame);
}

}  // namespace sctune::harness
