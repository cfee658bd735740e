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

#include "sctune/harness/config.hpp"

#include <fstream>
#include <stdexcept>

#ifndef SCTUNE_SOURCE_DIR
#define SCTUNE_SOURCE_DIR "."
#endif

namespace sctune::harness {
namespace fs = std::filesystem;
namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

CorpusConfig corpus_from_json(const nlohmann::json& j, CorpusConfig d) {
  d.path = j.value("path", d.path);
  d.seed = j.value("seed", d.seed);
  d.n_mov = j.value("n_mov", d.n_mov);
  if (d.n_mov < 1) throw std::invalid_argument("corpus n_mov must be positive");
  return d;
}

nlohmann::json corpus_to_json(const CorpusConfig& c) {
  return {{"path", c.path}, {"seed", c.seed}, {"n_mov", c.n_mov}};
}

sim::ClockSpec clock_from_json(const nlohmann::json& j) {
  sim::ClockSpec c;
  const std::string mode = j.value("clock", std::string("work"));
  if (mode == "work") {
    c.mode = sim::ClockSpec::Mode::kWork;
  } else if (mode == "system") {
    c.mode = sim::ClockSpec::Mode::kSystem;
  } else if (mode == "fixed") {
    c.mode = sim::ClockSpec::Mode::kFixed;
  } else {
    throw std::invalid_argument("unknown clock '" + mode + "'");
  }
  c.step_cost = j.value("step_cost", c.step_cost);
  c.fixed = j.value("fixed_solve_time", c.fixed);
  return c;
}

std::string clock_name(sim::ClockSpec::Mode m) {
  switch (m) {
    case sim::ClockSpec::Mode::kSystem: return "system";
    case sim::ClockSpec::Mode::kFixed: return "fixed";
    default: return "work";
  }
}

}  // namespace

fs::path AppConfig::resolve(const std::string& p) const {
  const fs::path path(p);
  return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

bayesopt::SearchSpace AppConfig::search_space() const {
  return space.empty() ? bayesopt::mpc_param_space() : bayesopt::mpc_param_space(space);
}

AppConfig load_config(const std::string& name_or_path) {
  fs::path path(name_or_path);
  const bool bare = !path.has_parent_path() && path.extension() != ".json";
  if (bare) {
    const fs::path local = fs::path("config") / (name_or_path + ".json");
    const fs::path source = fs::path(SCTUNE_SOURCE_DIR) / "config" / (name_or_path + ".json");
    path = fs::exists(local) ? local : source;
  }
  if (!fs::exists(path)) throw std::runtime_error("config not found: " + name_or_path);
  return config_from_json(read_json(path), fs::absolute(path).parent_path());
}

AppConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  AppConfig c;
  c.base_dir = base_dir;
  if (j.contains("environment")) c.environment = world::environment_from_json(j.at("environment"));
  if (j.contains("robot")) c.geometry = j.at("robot").get<robot::RobotGeometry>();
  if (j.contains("controller")) c.controller = j.at("controller").get<controller::ControllerConfig>();
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    if (m.contains("options")) c.metric_options = m.at("options").get<metrics::MetricOptions>();
    if (m.contains("weights")) c.weights = m.at("weights").get<metrics::MetricWeights>();
    if (m.contains("normalization")) {
      c.normalization = m.at("normalization").get<metrics::NormalizationSpec>();
    }
  }
  if (j.contains("scenarios")) {
    const auto& s = j.at("scenarios");
    c.scenarios.n_segments = s.value("n_segments", c.scenarios.n_segments);
    c.scenarios.duration = s.value("duration", c.scenarios.duration);
    c.scenarios.v_max = s.value("v_max", c.scenarios.v_max);
    c.scenarios.max_placement_tries =
        s.value("max_placement_tries", c.scenarios.max_placement_tries);
    if (s.contains("tuning")) c.tuning = corpus_from_json(s.at("tuning"), c.tuning);
    if (s.contains("holdout")) c.holdout = corpus_from_json(s.at("holdout"), c.holdout);
  }
  c.scenarios.n_mov = c.tuning.n_mov;
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    c.clock = clock_from_json(s);
    c.threads = s.value("threads", c.threads);
    c.failure_penalty = s.value("failure_penalty", c.failure_penalty);
  }
  if (j.contains("bayesopt")) {
    const auto& b = j.at("bayesopt");
    c.bo = b.get<bayesopt::BoConfig>();
    c.bo_n_mov = b.value("n_mov", c.bo_n_mov);
    if (b.contains("space")) c.space = b.at("space").get<std::vector<bayesopt::Dimension>>();
  }
  if (j.contains("screening")) {
    const auto& s = j.at("screening");
    c.screening.trajectories = s.value("trajectories", c.screening.trajectories);
    c.screening.levels = s.value("levels", c.screening.levels);
    c.screening.n_mov = s.value("n_mov", c.screening.n_mov);
  }
  if (j.contains("teleop")) {
    const auto& t = j.at("teleop");
    c.teleop.address = t.value("address", c.teleop.address);
    c.teleop.port = t.value("port", c.teleop.port);
    c.teleop.tick_rate = t.value("tick_rate", c.teleop.tick_rate);
    c.teleop.omega_max = t.value("omega_max", c.teleop.omega_max);
    if (t.contains("home")) {
      const auto h = t.at("home").get<std::vector<double>>();
      if (h.size() != 3) throw std::invalid_argument("teleop home needs 3 joints");
      c.teleop.home = {h[0], h[1], h[2]};
    }
    if (!(c.teleop.tick_rate > 0.0)) throw std::invalid_argument("tick rate must be positive");
  }
  if (j.contains("params")) {
    c.baseline_params = j.at("params").value("baseline", c.baseline_params);
    c.optimized_params = j.at("params").value("optimized", c.optimized_params);
  }
  if (c.bo_n_mov < 1) throw std::invalid_argument("bayesopt n_mov must be positive");
  if (!(c.failure_penalty > 0.0)) throw std::invalid_argument("failure penalty must be positive");
  c.geometry.validate();
  c.controller.validate();
  c.weights.validate();
  c.search_space();
  return c;
}

nlohmann::json config_to_json(const AppConfig& c) {
  nlohmann::json space = nlohmann::json::array();
  const bayesopt::SearchSpace search = c.search_space();
  for (const auto& d : search.dims()) space.push_back(d);
  nlohmann::json bo = c.bo;
  bo["n_mov"] = c.bo_n_mov;
  bo["space"] = space;
  return {
      {"environment", c.environment},
      {"robot", c.geometry},
      {"controller", c.controller},
      {"metrics",
       {{"options", c.metric_options},
        {"weights", c.weights},
        {"normalization", c.normalization}}},
      {"scenarios",
       {{"n_segments", c.scenarios.n_segments},
        {"duration", c.scenarios.duration},
        {"v_max", c.scenarios.v_max},
        {"max_placement_tries", c.scenarios.max_placement_tries},
        {"tuning", corpus_to_json(c.tuning)},
        {"holdout", corpus_to_json(c.holdout)}}},
      {"simulation",
       {{"clock", clock_name(c.clock.mode)},
        {"step_cost", c.clock.step_cost},
        {"fixed_solve_time", c.clock.fixed},
        {"threads", c.threads},
        {"failure_penalty", c.failure_penalty}}},
      {"bayesopt", bo},
      {"screening",
       {{"trajectories", c.screening.trajectories},
        {"levels", c.screening.levels},
        {"n_mov", c.screening.n_mov}}},
      {"teleop",
       {{"address", c.teleop.address},
        {"port", c.teleop.port},
        {"tick_rate", c.teleop.tick_rate},
        {"omega_max", c.teleop.omega_max},
        {"home", {c.teleop.home[0], c.teleop.home[1], c.teleop.home[2]}}}},
      {"params", {{"baseline", c.baseline_params}, {"optimized", c.optimized_params}}}};
}

controller::MpcParams load_params(const fs::path& path) {
  controller::MpcParams p = read_json(path).get<controller::MpcParams>();
  p.validate();
  return p;
}

void save_params(const fs::path& path, const controller::MpcParams& p) {
  write_json(path, p);
}

scenarios::MovementSet load_corpus(const fs::path& path) {
  return read_json(path).get<scenarios::MovementSet>();
}

void save_corpus(const fs::path& path, const scenarios::MovementSet& set) {
  write_json(path, set);
}

World::World(const world::EnvironmentSpec& spec)
    : grid(world::builtin_environment(spec)), esdf(grid) {}

sim::SimContext make_sim_context(const AppConfig& cfg, const World& world) {
  sim::SimContext ctx;
  ctx.esdf = &world.esdf;
  ctx.geometry = cfg.geometry;
  ctx.controller = cfg.controller;
  ctx.metric_options = cfg.metric_options;
  ctx.weights = cfg.weights;
  ctx.normalization = cfg.normalization;
  ctx.clock = cfg.clock;
  ctx.failure_penalty = cfg.failure_penalty;
  ctx.threads = cfg.threads;
  return ctx;
}

scenarios::MovementSet generate_corpus(const AppConfig& cfg, std::uint64_t seed,
                                       int n_mov, const World& world) {
  scenarios::ScenarioOptions opts = cfg.scenarios;
  opts.n_mov = n_mov;
  return scenarios::generate_movements(seed, opts, world.esdf, cfg.geometry,
                                       cfg.controller.limits, cfg.environment.name);
}

scenarios::MovementSet corpus(const AppConfig& cfg, const CorpusConfig& which,
                              const World& world) {
  if (!which.path.empty()) {
    const fs::path path = cfg.resolve(which.path);
    if (fs::exists(path)) return load_corpus(path);
  }
  return generate_corpus(cfg, which.seed, which.n_mov, world);
}

scenarios::MovementSet prefix(const scenarios::MovementSet& set, int n) {
  if (n < 1) throw std::invalid_argument("prefix needs at least one movement");
  scenarios::MovementSet out = set;
  if (static_cast<int>(out.movements.size()) > n) out.movements.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace sctune::harness
