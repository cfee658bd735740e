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

// Acceptance runner: one PASS/FAIL line per criterion, tolerances pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "replay.hpp"
#include "sctune/bayesopt/acquisition.hpp"
#include "sctune/bayesopt/optimizer.hpp"
#include "sctune/controller/mpc.hpp"
#include "sctune/harness/compare.hpp"
#include "sctune/harness/config.hpp"
#include "sctune/harness/experiments.hpp"
#include "sctune/harness/stats.hpp"
#include "sctune/robot/robot.hpp"
#include "sctune/world/esdf.hpp"

using namespace sctune;
using namespace sctune::testing;

namespace {

// Pinned tolerances and budgets.
constexpr int kEsdfGrids = 10;
constexpr int kEsdfSize = 64;
constexpr double kEsdfRuntime = 10.0;  // [s]
constexpr int kJacobianConfigs = 100;
constexpr double kJacobianTol = 1e-6;
constexpr int kSigmoidPairs = 1000;
constexpr int kMetricTrajectories = 100;
constexpr double kMetricTol = 1e-9;
constexpr int kGpInstances = 100;
constexpr int kGpMaxPoints = 10;
constexpr double kGpTol = 1e-8;
constexpr int kEiCases = 50;
constexpr int kEiSamples = 1000000;
constexpr double kEiRelTol = 1e-3;
constexpr int kBoSeeds = 10;
constexpr int kBoBudget = 50;  // evaluations
constexpr double kBoGap = 0.1;
constexpr double kBoRuntime = 120.0;  // [s]
constexpr double kSafetyClearance = 0.4;  // [m]
constexpr double kSafetyRuntime = 600.0;  // [s]
constexpr int kTuneNMov = 8;
constexpr int kTuneNMax = 30;
constexpr std::uint64_t kTuneSeed = 1;
constexpr double kTuneTarget = 0.05;
constexpr double kTuneRuntime = 1800.0;  // [s]
constexpr int kTtestDatasets = 50;
constexpr double kTtestTol = 1e-6;
constexpr double kReplayTol = 1e-6;  // [m]

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome esdf_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  numerics::Rng rng(1001);
  double worst = 0.0;
  double res = 0.0;
  for (int trial = 0; trial < kEsdfGrids; ++trial) {
    const world::OccupancyGrid g = random_grid(rng, kEsdfSize, kEsdfSize, 0.02 + 0.2 * rng.uniform());
    res = g.resolution();
    const world::Esdf esdf(g);
    for (int iy = 0; iy < g.height(); ++iy) {
      for (int ix = 0; ix < g.width(); ++ix) {
        worst = std::max(worst, std::abs(esdf.at(ix, iy) - brute_force(g, ix, iy, esdf.cap())));
      }
    }
  }
  const double tol = std::sqrt(2.0) * res;
  const double elapsed = seconds_since(t0);
  return {worst <= tol && elapsed < kEsdfRuntime,
          fmt("max deviation %.3g m (tol %.4g m), %.2f s (budget %.0f s)", worst, tol, elapsed, kEsdfRuntime)};
}

Outcome jacobian_check() {
  numerics::Rng rng(1002);
  const robot::RobotGeometry g;
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < kJacobianConfigs; ++i) {
    const robot::JointVector q(rng.uniform(-2.0, 2.0), rng.uniform(-std::numbers::pi, std::numbers::pi),
                               rng.uniform(-std::numbers::pi, std::numbers::pi));
    const Eigen::Matrix3d J = robot::jacobian(q, g);
    for (int k = 0; k < 3; ++k) {
      robot::JointVector qp = q;
      robot::JointVector qm = q;
      qp[k] += h;
      qm[k] -= h;
      const robot::Pose2 a = robot::forward_kinematics(qp, g);
      const robot::Pose2 b = robot::forward_kinematics(qm, g);
      const Eigen::Vector3d fd((a.x - b.x) / (2 * h), (a.y - b.y) / (2 * h),
                               std::remainder(a.theta - b.theta, 2 * std::numbers::pi) / (2 * h));
      worst = std::max(worst, (J.col(k) - fd).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= kJacobianTol, fmt("%d configurations, max |J - J_fd| %.3g (tol %.0e)", kJacobianConfigs,
                                     worst, kJacobianTol)};
}

Outcome sigmoid_penalty() {
  numerics::Rng rng(1003);
  int exact = 0;
  for (int i = 0; i < kSigmoidPairs; ++i) {
    const double c1 = rng.uniform(1.0, 20.0);
    const double c2 = rng.uniform(5.0, 40.0);
    const double c3 = rng.uniform(0.1, 1.0);
    exact += controller::obstacle_penalty(c3, c1, c2, c3) == c1 / 2.0 ? 1 : 0;
  }
  int monotone = 0;
  for (int i = 0; i < kSigmoidPairs; ++i) {
    const double c1 = rng.uniform(1.0, 20.0);
    const double c2 = rng.uniform(5.0, 40.0);
    const double c3 = 0.4;
    // Pairs spread over the region where the logistic is not saturated.
    const double a = rng.uniform(-0.2, 1.0);
    const double b = a + rng.uniform(1e-3, 0.5);
    monotone += controller::obstacle_penalty(a, c1, c2, c3) > controller::obstacle_penalty(b, c1, c2, c3) ? 1 : 0;
  }
  return {exact == kSigmoidPairs && monotone == kSigmoidPairs,
          fmt("B(c3) = c1/2 exactly in %d/%d, strictly decreasing in %d/%d pairs", exact, kSigmoidPairs,
              monotone, kSigmoidPairs)};
}

metrics::Trajectory analytic_traj(int n, double dt, const std::function<void(int, metrics::TrajectorySample&)>& fill) {
  metrics::Trajectory t;
  for (int g = 0; g < n; ++g) {
    metrics::TrajectorySample s;
    s.t = g * dt;
    s.sphere_distances.fill(1.0);
    fill(g, s);
    t.samples.push_back(s);
  }
  t.duration = n * dt;
  return t;
}

Outcome metrics_oracle() {
  numerics::Rng rng(1004);
  const metrics::MetricOptions opts;
  double worst = 0.0;
  for (int i = 0; i < kMetricTrajectories; ++i) {
    const metrics::Trajectory t = random_traj(rng);
    const metrics::MetricVector m = metrics::evaluate_metrics(t, opts);
    worst = std::max({worst, std::abs(m.d_ob - naive_d_ob(t)), std::abs(m.t_ob - naive_t_ob(t, opts.d_safe)),
                      std::abs(m.f_ps - naive_f_ps(t)), std::abs(m.f_cc - naive_f_cc(t, opts.min_speed)),
                      std::abs(m.f_vs - naive_f_vs(t, opts.accel_deadband)), std::abs(m.t_c - naive_t_c(t))});
  }
  // Straight line on a dyadic grid so that every difference is exact.
  const metrics::Trajectory line = analytic_traj(64, 0.5, [](int g, metrics::TrajectorySample& s) {
    s.state.ee = {0.125 * g, -0.0625 * g, 0.3};
  });
  const metrics::Trajectory ramp = analytic_traj(64, 0.05, [](int g, metrics::TrajectorySample& s) {
    s.applied = robot::JointVelocity(0.01 * g, -0.02 * g, 0.005 * g);
  });
  const double f_ps = metrics::path_smoothness(line);
  const double f_cc = metrics::curvature_change(line).value;
  const double f_vs = metrics::velocity_smoothness(ramp, opts.accel_deadband);
  const bool exact = f_ps == 0.0 && f_cc == 0.0 && f_vs == 0.0;
  return {worst <= kMetricTol && exact,
          fmt("%d trajectories, max deviation %.3g (tol %.0e); line f_ps=%g f_cc=%g; ramp f_vs=%g",
              kMetricTrajectories, worst, kMetricTol, f_ps, f_cc, f_vs)};
}

Outcome gp_correctness() {
  numerics::Rng rng(1005);
  double worst_mean = 0.0;
  double worst_var = 0.0;
  for (int trial = 0; trial < kGpInstances; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(4));
    const int n = 2 + static_cast<int>(rng.below(kGpMaxPoints - 1));
    const Eigen::MatrixXd X = random_inputs(rng, n, d);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.uniform(-2.0, 5.0);
    const GpHypers h = random_hypers(rng, d);
    const bayesopt::GpModel gp = bayesopt::GpModel::with_hypers(X, y, h);
    const Eigen::VectorXd x = random_inputs(rng, 1, d).row(0);
    const PosteriorOracle o = posterior_oracle(X, y, h, x);
    const bayesopt::Posterior p = gp.posterior(x);
    worst_mean = std::max(worst_mean, std::abs(p.mean - o.mean));
    worst_var = std::max(worst_var, std::abs(p.variance - o.variance));
  }
  double worst_ei = 0.0;
  for (int i = 0; i < kEiCases; ++i) {
    const double mean = rng.uniform(-1.0, 1.0);
    const double sigma = rng.uniform(0.05, 1.0);
    const double best = mean + sigma * rng.uniform(-2.0, 2.0);
    const double mc = ei_monte_carlo(mean, sigma, best, kEiSamples, rng);
    worst_ei = std::max(worst_ei, std::abs(bayesopt::expected_improvement(mean, sigma, best) - mc) / mc);
  }
  return {worst_mean <= kGpTol && worst_var <= kGpTol && worst_ei <= kEiRelTol,
          fmt("posterior |dmean| %.3g |dvar| %.3g (tol %.0e, n <= %d, %d instances); EI rel. dev %.3g "
              "(tol %.0e, %d cases x %d samples)",
              worst_mean, worst_var, kGpTol, kGpMaxPoints, kGpInstances, worst_ei, kEiRelTol, kEiCases,
              kEiSamples)};
}

double branin(const Eigen::VectorXd& p) {
  const double a = 1.0;
  const double b = 5.1 / (4 * std::numbers::pi * std::numbers::pi);
  const double c = 5.0 / std::numbers::pi;
  const double r = 6.0;
  const double s = 10.0;
  const double t = 1.0 / (8 * std::numbers::pi);
  const double u = p[1] - b * p[0] * p[0] + c * p[0] - r;
  return a * u * u + s * (1 - t) * std::cos(p[0]) + s;
}

Outcome bo_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr double kBraninMin = 0.397887357729738;
  const bayesopt::SearchSpace space({{"x1", -5.0, 10.0, false}, {"x2", 0.0, 15.0, false}});
  std::vector<double> gaps;
  for (int seed = 1; seed <= kBoSeeds; ++seed) {
    bayesopt::BoConfig cfg;
    cfg.n_init = 8;
    cfg.n_max = kBoBudget - cfg.n_init;
    cfg.seed = static_cast<std::uint64_t>(seed);
    const auto r = bayesopt::optimize(cfg, space, [](const Eigen::VectorXd& x) {
      bayesopt::Observation o;
      o.objective = branin(x);
      return o;
    });
    gaps.push_back(r.best().objective - kBraninMin);
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = 0.5 * (gaps[kBoSeeds / 2 - 1] + gaps[kBoSeeds / 2]);
  const double elapsed = seconds_since(t0);
  return {median <= kBoGap && elapsed < kBoRuntime,
          fmt("Branin, %d evaluations, median gap to optimum %.3g over %d seeds (tol %.1f, worst %.3g), "
              "%.1f s (budget %.0f s)",
              kBoBudget, median, kBoSeeds, kBoGap, gaps.back(), elapsed, kBoRuntime)};
}

Outcome safety_constraint() {
  const auto t0 = std::chrono::steady_clock::now();
  const harness::AppConfig cfg = harness::load_config("default");
  const harness::World world(cfg.environment);
  const sim::SimContext ctx = harness::make_sim_context(cfg, world);
  const scenarios::MovementSet corpus = harness::corpus(cfg, cfg.tuning, world);
  const controller::MpcParams baseline = controller::MpcParams::baseline();
  int bad = 0;
  double min_sd = INFINITY;
  double max_t_ob = 0.0;
  int infeasible = 0;
  for (const auto& mv : corpus.movements) {
    const sim::RunOutcome run = sim::run_movement(mv, baseline, ctx);
    const double t_ob = metrics::time_near_obstacles(run.trajectory, ctx.metric_options.d_safe);
    min_sd = std::min(min_sd, run.min_sd);
    max_t_ob = std::max(max_t_ob, t_ob);
    infeasible += run.infeasible_solves;
    bad += (run.min_sd >= kSafetyClearance && t_ob == 0.0) ? 0 : 1;
  }
  const double elapsed = seconds_since(t0);
  return {bad == 0 && corpus.movements.size() == 40 && elapsed < kSafetyRuntime,
          fmt("%zu movements, min_sd %.4f m (>= %.1f), max t_ob %.3g %%, %d violating, %d infeasible solves, "
              "%.0f s (budget %.0f s)",
              corpus.movements.size(), min_sd, kSafetyClearance, max_t_ob, bad, infeasible, elapsed,
              kSafetyRuntime)};
}

Outcome end_to_end_tuning() {
  const auto t0 = std::chrono::steady_clock::now();
  harness::AppConfig cfg = harness::load_config("default");
  cfg.bo_n_mov = kTuneNMov;
  cfg.bo.n_max = kTuneNMax;
  cfg.bo.seed = kTuneSeed;
  const harness::World world(cfg.environment);
  const controller::MpcParams baseline = harness::load_params(cfg.resolve(cfg.baseline_params));
  const harness::TuningRun tuning = harness::run_tuning(cfg, world, baseline);
  const double j_best = tuning.result.best().objective;

  const sim::SimContext ctx = harness::make_sim_context(cfg, world);
  const scenarios::MovementSet holdout = harness::corpus(cfg, cfg.holdout, world);
  const harness::ComparisonReport r = harness::compare(baseline, tuning.best, holdout, ctx);
  const bool no_regression = r.b.n_succ >= r.a.n_succ && r.b.infeasible_rate <= r.a.infeasible_rate;
  const double gain = r.relative_improvement();

  // The shipped optimized parameters are the result of this exact run.
  const controller::MpcParams shipped = harness::load_params(cfg.resolve(cfg.optimized_params));
  const bool reproducible = shipped == tuning.best;
  const double elapsed = seconds_since(t0);
  return {j_best <= tuning.baseline_objective && r.b.objective <= r.a.objective && no_regression &&
              gain >= kTuneTarget && reproducible && elapsed < kTuneRuntime,
          fmt("tuning J %.5f -> %.5f; holdout (%d movements) J %.5f -> %.5f (%.1f %% lower, target %.0f %%), "
              "n_succ %d -> %d, infeasible %.3f -> %.3f; shipped params %s; %.0f s (budget %.0f s)",
              tuning.baseline_objective, j_best, r.n_mov, r.a.objective, r.b.objective, 100 * gain,
              100 * kTuneTarget, r.a.n_succ, r.b.n_succ, r.a.infeasible_rate, r.b.infeasible_rate,
              reproducible ? "reproduced" : "DIFFER", elapsed, kTuneRuntime)};
}

Outcome ttest_oracle() {
  numerics::Rng rng(1009);
  double worst = 0.0;
  for (int i = 0; i < kTtestDatasets; ++i) {
    const int na = 3 + static_cast<int>(rng.below(48));
    const int nb = 3 + static_cast<int>(rng.below(48));
    const auto a = normal_sample(rng, na, rng.uniform(-1, 1), rng.uniform(0.1, 2.0));
    const auto b = normal_sample(rng, nb, rng.uniform(-1, 1), rng.uniform(0.1, 2.0));
    for (const auto tail : {harness::Tail::kLess, harness::Tail::kGreater}) {
      worst = std::max(worst, std::abs(harness::t_test_one_tailed(a, b, tail) - welch_oracle(a, b, tail)));
    }
  }
  const std::vector<double> same = normal_sample(rng, 12, 0.3, 0.2);
  const double p_same = harness::t_test_one_tailed(same, same, harness::Tail::kLess);
  return {worst <= kTtestTol && p_same == 0.5,
          fmt("%d datasets, max |p - p_quad| %.3g (tol %.0e); identical samples p = %g", kTtestDatasets, worst,
              kTtestTol, p_same)};
}

Outcome teleop_replay() {
  const harness::AppConfig cfg = harness::load_config("default");
  const harness::World world(cfg.environment);
  const sim::SimContext ctx = harness::make_sim_context(cfg, world);
  const controller::MpcParams baseline = harness::load_params(cfg.resolve(cfg.baseline_params));
  const controller::MpcParams optimized = harness::load_params(cfg.resolve(cfg.optimized_params));
  const scenarios::MovementSet corpus = harness::corpus(cfg, cfg.tuning, world);
  LockstepServer server(harness::make_session_factory(cfg, world, baseline, optimized),
                        harness::make_episode_handler(ctx));
  double worst = 0.0;
  std::size_t samples = 0;
  for (const auto& [condition, params] : {std::pair{"baseline", baseline}, std::pair{"optimized", optimized}}) {
    const scenarios::Movement& mv = corpus.movements.front();
    const sim::RunOutcome run = sim::run_movement(mv, params, ctx);
    const ReplayResult replay = replay_movement(server.port(), mv, condition, ctx.controller.sample_time);
    worst = std::max(worst, replay_deviation(replay, run));
    samples += run.trajectory.samples.size();
  }
  return {worst <= kReplayTol,
          fmt("corpus movement 0 under both conditions over WebSocket, %zu samples, max deviation %.3g m "
              "(tol %.0e m)",
              samples, worst, kReplayTol)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"esdf_oracle", esdf_oracle},
      {"jacobian_check", jacobian_check},
      {"sigmoid_penalty", sigmoid_penalty},
      {"metrics_oracle", metrics_oracle},
      {"gp_correctness", gp_correctness},
      {"bo_sanity", bo_sanity},
      {"safety_constraint", safety_constraint},
      {"end_to_end_tuning", end_to_end_tuning},
      {"ttest_oracle", ttest_oracle},
      {"teleop_replay", teleop_replay},
  };

  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "Run only the named criteria");
  app.add_flag("--list", list, "List criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria) std::cout << c.name << '\n';
    return 0;
  }
  for (const auto& name : only) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == name; })) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
  }

  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++ran;
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
