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

#include "sctune/harness/experiments.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "sctune/bayesopt/space.hpp"

namespace sctune::harness {
namespace fs = std::filesystem;

RunDir::RunDir(fs::path path) : path_(std::move(path)) { fs::create_directories(path_); }

void RunDir::write_config(const AppConfig& cfg) const { write_json("config.json", config_to_json(cfg)); }

void RunDir::write_corpus(const scenarios::MovementSet& set, const std::string& name) const {
  save_corpus(file(name), set);
}

void RunDir::write_json(const std::string& name, const nlohmann::json& j) const {
  write_text(name, j.dump(2) + "\n");
}

void RunDir::write_text(const std::string& name, const std::string& text) const {
  std::ofstream out(file(name), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file(name).string());
  out << text;
}

std::ofstream RunDir::open_log(const std::string& name) const {
  std::ofstream out(file(name), std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file(name).string());
  return out;
}

bayesopt::Evaluator make_param_evaluator(const bayesopt::SearchSpace& space,
                                         const scenarios::MovementSet& corpus,
                                         const sim::SimContext& ctx) {
  if (corpus.movements.empty()) throw std::invalid_argument("tuning corpus is empty");
  return [&space, &corpus, ctx](const Eigen::VectorXd& raw) {
    const controller::MpcParams params = bayesopt::vector_to_params(space.snap(raw));
    const sim::EvalResult r = sim::evaluate_params(params, corpus, ctx);
    bayesopt::Observation obs;
    obs.objective = r.objective;
    obs.feasible = r.feasible;
    obs.details = {{"params", params},
                   {"mean_objective", r.mean_objective},
                   {"n_succ", r.n_succ},
                   {"n_mov", static_cast<int>(r.movements.size())}};
    return obs;
  };
}

TuningRun run_tuning(const AppConfig& cfg, const World& world,
                     const controller::MpcParams& baseline,
                     const bayesopt::OptimizeHooks& hooks) {
  const bayesopt::SearchSpace space = cfg.search_space();
  const scenarios::MovementSet tuning = prefix(corpus(cfg, cfg.tuning, world), cfg.bo_n_mov);
  const sim::SimContext ctx = make_sim_context(cfg, world);
  const bayesopt::Evaluator evaluate = make_param_evaluator(space, tuning, ctx);

  TuningRun run;
  run.result = bayesopt::optimize(cfg.bo, space, evaluate,
                                  {bayesopt::params_to_vector(baseline)}, hooks);
  run.best = bayesopt::vector_to_params(space.snap(run.result.best().raw));
  run.baseline_objective = run.result.history.front().objective;
  return run;
}

bayesopt::MorrisResult run_screening(const AppConfig& cfg, const World& world) {
  const bayesopt::SearchSpace space = cfg.search_space();
  const scenarios::MovementSet set = prefix(corpus(cfg, cfg.tuning, world), cfg.screening.n_mov);
  const sim::SimContext ctx = make_sim_context(cfg, world);
  bayesopt::MorrisOptions opts;
  opts.trajectories = cfg.screening.trajectories;
  opts.levels = cfg.screening.levels;
  opts.seed = cfg.bo.seed;
  return bayesopt::elementary_effects(
      space,
      [&](const Eigen::VectorXd& raw) {
        return sim::evaluate_params(bayesopt::vector_to_params(raw), set, ctx).objective;
      },
      opts);
}

SessionFactory make_session_factory(const AppConfig& cfg, const World& world,
                                    const controller::MpcParams& baseline,
                                    const controller::MpcParams& optimized,
                                    const controller::MpcParams* custom) {
  std::map<std::string, controller::MpcParams> conditions = {{"baseline", baseline},
                                                             {"optimized", optimized}};
  if (custom != nullptr) conditions.emplace("custom", *custom);
  TeleopOptions options;
  options.v_max = cfg.scenarios.v_max;
  options.omega_max = cfg.teleop.omega_max;
  options.home = cfg.teleop.home;
  sim::SimContext ctx = make_sim_context(cfg, world);
  return [ctx, conditions, options](std::uint64_t id) {
    return std::make_unique<TeleopSession>(id, ctx, conditions, options);
  };
}

EpisodeHandler make_episode_handler(const sim::SimContext& ctx, std::ostream* log) {
  auto mutex = std::make_shared<std::mutex>();
  return [ctx, log, mutex](const EpisodeRecord& record) {
    std::string frame = metrics_frame(record, ctx);
    if (log != nullptr) {
      nlohmann::json line = nlohmann::json::parse(frame);
      line["session"] = record.session_id;
      line["params"] = record.params;
      const std::lock_guard<std::mutex> lock(*mutex);
      *log << line.dump() << '\n' << std::flush;
    }
    return frame;
  };
}

std::string format_tuning(const TuningRun& run, const bayesopt::SearchSpace& space) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-5s %-10s %-10s %s\n", "#", "phase", "J", "best",
                "params");
  out << line;
  for (const auto& e : run.result.history) {
    std::string params;
    const Eigen::VectorXd x = space.snap(e.raw);
    for (int i = 0; i < x.size(); ++i) {
      char v[32];
      std::snprintf(v, sizeof v, "%s=%.4g", space.dims()[static_cast<std::size_t>(i)].name.c_str(),
                    x[i]);
      params += (i > 0 ? " " : "") + std::string(v);
    }
    std::snprintf(line, sizeof line, "%-4d %-5s %-10.5f %-10.5f %s\n", e.index, e.phase.c_str(),
                  e.objective, e.incumbent, params.c_str());
    out << line;
  }
  const auto& best = run.result.best();
  std::snprintf(line, sizeof line, "\nbest: #%d J=%.5f (baseline J=%.5f, %.2f %% lower)\n",
                best.index, best.objective, run.baseline_objective,
                run.baseline_objective != 0.0
                    ? 100.0 * (run.baseline_objective - best.objective) / run.baseline_objective
                    : 0.0);
  out << line;
  return out.str();
}

std::string format_screening(const bayesopt::MorrisResult& result) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %-12s %-12s %-12s\n", "param", "mu*", "mu", "sigma");
  out << line;
  for (int i : result.ranking) {
    const auto& e = result.effects[static_cast<std::size_t>(i)];
    std::snprintf(line, sizeof line, "%-8s %-12.5g %-12.5g %-12.5g\n", e.name.c_str(), e.mu_star,
                  e.mu, e.sigma);
    out << line;
  }
  out << "evaluations: " << result.evaluations << "\n";
  return out.str();
}

}  // namespace sctune::harness
