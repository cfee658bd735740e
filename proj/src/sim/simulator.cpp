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

#include "sctune/sim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace sctune::sim {

double SteadySolveClock::stop(const controller::ControlResult&,
                              const controller::MpcParams&) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_)
      .count();
}

double WorkSolveClock::stop(const controller::ControlResult& result,
                            const controller::MpcParams& params) {
  return step_cost_ * result.cost_evaluations * params.prediction_horizon;
}

std::unique_ptr<SolveClock> ClockSpec::make() const {
  switch (mode) {
    case Mode::kSystem:
      return std::make_unique<SteadySolveClock>();
    case Mode::kFixed:
      return std::make_unique<FixedSolveClock>(fixed);
    case Mode::kWork:
    default:
      return std::make_unique<WorkSolveClock>(step_cost);
  }
}

RunOutcome run_movement(const scenarios::Movement& mv,
                        const controller::MpcParams& params,
                        const SimContext& ctx) {
  if (ctx.esdf == nullptr) throw std::invalid_argument("simulation needs an ESDF");
  const double ts = ctx.controller.sample_time;
  const double total = mv.total_time();
  const int ticks = static_cast<int>(std::lround(total / ts));

  controller::SharedController ctl(params, ctx.controller, ctx.geometry, *ctx.esdf);
  const std::unique_ptr<SolveClock> clock = ctx.clock.make();

  RunOutcome out;
  out.trajectory.duration = total;
  out.trajectory.samples.reserve(static_cast<std::size_t>(ticks));
  robot::RobotState state = robot::make_state(mv.initial_joints, ctx.geometry);
  double min_sd = std::numeric_limits<double>::infinity();

  for (int k = 0; k < ticks; ++k) {
    const double t = k * ts;
    const robot::Twist reference = mv.twist_at(t);
    clock->start();
    const controller::SharedController::Step step = ctl.step(state, reference);
    const double solve_time = clock->stop(step.result, params);

    metrics::TrajectorySample sample;
    sample.t = t;
    sample.state = state;
    sample.applied = step.applied;
    sample.solve_time = solve_time;
    sample.feasible = step.result.feasible;
    const robot::SphereCenters centers = robot::sphere_centers(state.joints, ctx.geometry);
    for (int m = 0; m < robot::kSphereCount; ++m) {
      const world::DistanceQuery dq = ctx.esdf->signed_distance(centers[m]);
      sample.sphere_distances[m] = dq.distance;
      out.out_of_map = out.out_of_map || dq.out_of_map;
    }
    min_sd = std::min(min_sd, sample.min_distance());
    if (!step.result.feasible) ++out.infeasible_solves;
    out.trajectory.samples.push_back(sample);

    state = robot::step_kinematics(state, step.applied, ts, ctx.geometry);
  }

  out.min_sd = ticks > 0 ? min_sd : 0.0;
  out.infeasible_fraction =
      ticks > 0 ? static_cast<double>(out.infeasible_solves) / ticks : 0.0;
  out.success = ticks > 0 && out.infeasible_solves == 0 &&
                out.min_sd >= ctx.geometry.sphere_radius;
  return out;
}

double aggregate_objective(const std::vector<MovementEval>& movements,
                           double failure_penalty, bool* feasible) {
  if (movements.empty()) throw std::invalid_argument("no movements to aggregate");
  double total = 0.0;
  bool ok = true;
  for (const auto& m : movements) {
    total += m.objective;
    ok = ok && m.success;
  }
  if (feasible != nullptr) *feasible = ok;
  return ok ? total / static_cast<double>(movements.size()) : failure_penalty;
}

EvalResult evaluate_params(const controller::MpcParams& params,
                           const scenarios::MovementSet& set,
                           const SimContext& ctx) {
  if (set.movements.empty()) throw std::invalid_argument("empty movement set");
  params.validate();
  const auto begin = std::chrono::steady_clock::now();

  EvalResult result;
  result.params = params;
  result.movements.resize(set.movements.size());

  const auto evaluate_one = [&](std::size_t i) {
    const scenarios::Movement& mv = set.movements[i];
    const RunOutcome run = run_movement(mv, params, ctx);
    MovementEval& e = result.movements[i];
    e.id = mv.id;
    e.metrics = metrics::evaluate_metrics(run.trajectory, ctx.metric_options);
    e.objective = metrics::normalized_objective(e.metrics, ctx.weights, ctx.normalization);
    e.success = run.success;
    e.min_sd = run.min_sd;
    e.infeasible_fraction = run.infeasible_fraction;
  };

  int threads = ctx.threads > 0 ? ctx.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(set.movements.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < set.movements.size(); ++i) evaluate_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < set.movements.size(); i = next++) {
            evaluate_one(i);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  double mean = 0.0;
  for (const auto& m : result.movements) {
    mean += m.objective;
    if (m.success) ++result.n_succ;
  }
  result.mean_objective = mean / static_cast<double>(result.movements.size());
  result.objective =
      aggregate_objective(result.movements, ctx.failure_penalty, &result.feasible);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  return result;
}

void to_json(nlohmann::json& j, const MovementEval& m) {
  j = {{"id", m.id},
       {"metrics", m.metrics},
       {"objective", m.objective},
       {"success", m.success},
       {"min_sd", m.min_sd},
       {"infeasible_fraction", m.infeasible_fraction}};
}

void to_json(nlohmann::json& j, const EvalResult& r) {
  j = {{"params", r.params},
       {"objective", r.objective},
       {"mean_objective", r.mean_objective},
       {"n_succ", r.n_succ},
       {"n_mov", r.movements.size()},
       {"feasible", r.feasible},
       {"wall_time", r.wall_time},
       {"movements", r.movements}};
}

void write_eval_log(std::ostream& out, const EvalResult& result,
                    const std::string& label) {
  for (const auto& m : result.movements) {
    nlohmann::json line = m;
    line["type"] = "movement";
    line["params"] = result.params;
    if (!label.empty()) line["label"] = label;
    out << line.dump() << '\n';
  }
  nlohmann::json summary = {{"type", "summary"},
                            {"params", result.params},
                            {"objective", result.objective},
                            {"mean_objective", result.mean_objective},
                            {"n_succ", result.n_succ},
                            {"n_mov", result.movements.size()},
                            {"feasible", result.feasible},
                            {"wall_time", result.wall_time}};
  if (!label.empty()) summary["label"] = label;
  out << summary.dump() << '\n';
}

}  // namespace sctune::sim
