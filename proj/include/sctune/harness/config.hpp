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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctune/bayesopt/optimizer.hpp"
#include "sctune/bayesopt/space.hpp"
#include "sctune/controller/mpc.hpp"
#include "sctune/metrics/metrics.hpp"
#include "sctune/robot/robot.hpp"
#include "sctune/scenarios/movements.hpp"
#include "sctune/sim/simulator.hpp"
#include "sctune/world/environment.hpp"
#include "sctune/world/esdf.hpp"
#include "sctune/world/occupancy_grid.hpp"

namespace sctune::harness {

struct CorpusConfig {
  std::string path;  // committed corpus; regenerated from seed when missing
  std::uint64_t seed = 1;
  int n_mov = 40;
};

struct ScreeningConfig {
  int trajectories = 6;
  int levels = 4;
  int n_mov = 4;
};

struct TeleopConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  double tick_rate = 20.0;   // [Hz]
  double omega_max = 1.0;    // [rad/s] clamp for the rotational command
  robot::JointVector home{0.0, 0.5, -0.5};
};

struct AppConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this

  world::EnvironmentSpec environment = world::EnvironmentSpec::operating_room();
  robot::RobotGeometry geometry;
  controller::ControllerConfig controller;
  metrics::MetricOptions metric_options;
  metrics::MetricWeights weights;
  metrics::NormalizationSpec normalization;
  scenarios::ScenarioOptions scenarios;
  CorpusConfig tuning{"", 1, 40};
  CorpusConfig holdout{"", 2, 50};
  sim::ClockSpec clock;
  int threads = 0;
  double failure_penalty = 1.0;
  bayesopt::BoConfig bo;
  int bo_n_mov = 8;  // prefix of the tuning corpus used inside the BO loop
  std::vector<bayesopt::Dimension> space;  // empty = default bounds
  ScreeningConfig screening;
  TeleopConfig teleop;
  std::string baseline_params;
  std::string optimized_params;

  std::filesystem::path resolve(const std::string& p) const;
  bayesopt::SearchSpace search_space() const;
};

/// `name_or_path` is a JSON file path or a bare name looked up as
/// config/<name>.json in the working directory and then the source tree.
AppConfig load_config(const std::string& name_or_path);
AppConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json config_to_json(const AppConfig& cfg);

controller::MpcParams load_params(const std::filesystem::path& path);
void save_params(const std::filesystem::path& path, const controller::MpcParams& p);

scenarios::MovementSet load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const scenarios::MovementSet& set);

/// Occupancy grid and ESDF of the configured environment.
struct World {
  world::OccupancyGrid grid;
  world::Esdf esdf;

  explicit World(const world::EnvironmentSpec& spec);
};

/// The context's ESDF pointer refers into `world`, which must outlive it.
sim::SimContext make_sim_context(const AppConfig& cfg, const World& world);

/// Loads the corpus file when present, otherwise generates it from its seed.
scenarios::MovementSet corpus(const AppConfig& cfg, const CorpusConfig& which,
                              const World& world);
scenarios::MovementSet generate_corpus(const AppConfig& cfg, std::uint64_t seed,
                                       int n_mov, const World& world);

/// First n movements of a set.
scenarios::MovementSet prefix(const scenarios::MovementSet& set, int n);

}  // namespace sctune::harness
