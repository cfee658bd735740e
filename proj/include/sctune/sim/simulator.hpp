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

#include <chrono>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctune/controller/mpc.hpp"
#include "sctune/metrics/metrics.hpp"
#include "sctune/robot/robot.hpp"
#include "sctune/scenarios/movements.hpp"
#include "sctune/world/esdf.hpp"

namespace sctune::sim {

/// Source of per-tick solve durations. Implementations are per run (one
/// controller), so they need no synchronization.
class SolveClock {
 public:
  virtual ~SolveClock() = default;
  virtual void start() = 0;
  /// Seconds charged for the solve that just finished.
  virtual double stop(const controller::ControlResult& result,
                      const controller::MpcParams& params) = 0;
};

/// Monotonic wall clock.
class SteadySolveClock final : public SolveClock {
 public:
  void start() override { begin_ = std::chrono::steady_clock::now(); }
  double stop(const controller::ControlResult&, const controller::MpcParams&) override;

 private:
  std::chrono::steady_clock::time_point begin_;
};

/// Deterministic work clock: each horizon evaluation is charged
/// Np * step_cost seconds.
class WorkSolveClock final : public SolveClock {
 public:
  explicit WorkSolveClock(double step_cost) : step_cost_(step_cost) {}
  void start() override {}
  double stop(const controller::ControlResult& result,
              const controller::MpcParams& params) override;

 private:
  double step_cost_;
};

/// Constant duration per solve (tests).
class FixedSolveClock final : public SolveClock {
 public:
  explicit FixedSolveClock(double seconds) : seconds_(seconds) {}
  void start() override {}
  double stop(const controller::ControlResult&, const controller::MpcParams&) override {
    return seconds_;
  }

 private:
  double seconds_;
};

struct ClockSpec {
  enum class Mode { kSystem, kWork, kFixed };
  Mode mode = Mode::kWork;
  double step_cost = 0.5e-6;  // [s] per predicted step per evaluation (work mode)
  double fixed = 0.0;        // [s] (fixed mode)

  std::unique_ptr<SolveClock> make() const;
};

/// Everything a closed-loop run needs besides the movement and parameters.
struct SimContext {
  const world::Esdf* esdf = nullptr;
  robot::RobotGeometry geometry;
  controller::ControllerConfig controller;
  metrics::MetricOptions metric_options;
  metrics::MetricWeights weights;
  metrics::NormalizationSpec normalization;
  ClockSpec clock;
  double failure_penalty = 1.0;
  /// Worker threads for evaluate_params; 0 = hardware concurrency.
  int threads = 0;
};

struct RunOutcome {
  metrics::Trajectory trajectory;
  bool success = false;
  double infeasible_fraction = 0.0;
  double min_sd = 0.0;
  int infeasible_solves = 0;
  bool out_of_map = false;
};

/// Closed loop over one movement: tick k solves with the active segment's
/// twist, applies the controller's input (last feasible on infeasible solves)
/// and records the pre-step state. Never throws for run-time failures.
RunOutcome run_movement(const scenarios::Movement& mv,
                        const controller::MpcParams& params,
                        const SimContext& ctx);

struct MovementEval {
  int id = 0;
  metrics::MetricVector metrics;
  double objective = 0.0;
  bool success = false;
  double min_sd = 0.0;
  double infeasible_fraction = 0.0;
};

struct EvalResult {
  controller::MpcParams params;
  std::vector<MovementEval> movements;
  double objective = 0.0;  // J
  double mean_objective = 0.0;  // mean before the failure penalty
  int n_succ = 0;
  bool feasible = true;  // false when J was replaced by the failure penalty
  double wall_time = 0.0;
};

/// Runs every movement (concurrently when threads > 1; results kept in
/// movement order) and aggregates J as the mean normalized objective, or the
/// failure penalty when any movement fails.
EvalResult evaluate_params(const controller::MpcParams& params,
                           const scenarios::MovementSet& set,
                           const SimContext& ctx);

/// Mean of the per-movement objectives with the failure rule applied.
double aggregate_objective(const std::vector<MovementEval>& movements,
                           double failure_penalty, bool* feasible = nullptr);

/// One JSON line per movement followed by a summary line.
void write_eval_log(std::ostream& out, const EvalResult& result,
                    const std::string& label = "");

void to_json(nlohmann::json& j, const MovementEval& m);
void to_json(nlohmann::json& j, const EvalResult& r);

}  // namespace sctune::sim
