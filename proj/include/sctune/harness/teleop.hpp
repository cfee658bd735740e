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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sctune/controller/mpc.hpp"
#include "sctune/metrics/metrics.hpp"
#include "sctune/robot/robot.hpp"
#include "sctune/sim/simulator.hpp"

namespace sctune::harness {

struct TeleopOptions {
  double v_max = 0.5;      // [m/s] translational command clamp
  double omega_max = 1.0;  // [rad/s]
  robot::JointVector home{0.0, 0.5, -0.5};
};

/// A finished episode, handed off for metric computation.
struct EpisodeRecord {
  std::uint64_t session_id = 0;
  int episode = 0;
  std::string condition;
  controller::MpcParams params;
  metrics::Trajectory trajectory;
  int infeasible_solves = 0;
};

/// One robot driven by one client. Transport independent: frames in, frames
/// out. The owner calls tick() at the control rate.
class TeleopSession {
 public:
  enum class Status { kIdle, kActive };

  /// conditions maps a name ("baseline", "optimized", ...) to its parameters.
  TeleopSession(std::uint64_t id, sim::SimContext ctx,
                std::map<std::string, controller::MpcParams> conditions,
                TeleopOptions options);

  struct Reply {
    std::vector<std::string> frames;
    /// Set when an episode ended; metrics are computed by the caller.
    std::optional<EpisodeRecord> finished;
  };

  /// Parses one client text frame. Malformed input yields an error frame and
  /// leaves the session unchanged.
  Reply handle_message(const std::string& text);

  /// Advances one control period when an episode is active, then returns the
  /// state frame. While idle the robot holds still and time does not advance.
  std::string tick();

  /// Current state frame without advancing.
  std::string state_frame() const;

  std::uint64_t id() const { return id_; }
  Status status() const { return status_; }
  const std::string& condition() const { return condition_; }
  double time() const { return time_; }
  const robot::RobotState& state() const { return state_; }
  const metrics::Trajectory& trajectory() const { return trajectory_; }

 private:
  Reply start_episode(const nlohmann::json& msg);
  Reply end_episode();

  std::uint64_t id_;
  sim::SimContext ctx_;
  std::map<std::string, controller::MpcParams> conditions_;
  TeleopOptions options_;
  std::unique_ptr<sim::SolveClock> clock_;

  Status status_ = Status::kIdle;
  std::string condition_ = "baseline";
  std::optional<controller::SharedController> controller_;
  robot::RobotState state_;
  robot::Twist reference_ = robot::Twist::Zero();
  bool reference_clamped_ = false;
  bool last_feasible_ = true;
  double time_ = 0.0;
  int ticks_ = 0;
  int episode_ = 0;
  int infeasible_solves_ = 0;
  metrics::Trajectory trajectory_;
};

/// The metrics frame for a finished episode.
std::string metrics_frame(const EpisodeRecord& record, const sim::SimContext& ctx);

std::string error_frame(const std::string& msg);

/// Clamps (vx, vy) to v_max in magnitude and omega to omega_max. Returns true
/// when anything changed.
bool clamp_twist(robot::Twist& twist, double v_max, double omega_max);

}  // namespace sctune::harness
