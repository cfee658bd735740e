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
#include <fstream>
#include <mutex>
#include <string>

#include <json.hpp>

#include "sctune/bayesopt/morris.hpp"
#include "sctune/bayesopt/optimizer.hpp"
#include "sctune/harness/compare.hpp"
#include "sctune/harness/config.hpp"
#include "sctune/harness/teleop_server.hpp"

namespace sctune::harness {

/// Output directory of one CLI command: config snapshot, corpus, JSON-lines
/// logs and the report.
class RunDir {
 public:
  explicit RunDir(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

  void write_config(const AppConfig& cfg) const;
  void write_corpus(const scenarios::MovementSet& set, const std::string& name = "corpus.json") const;
  void write_json(const std::string& name, const nlohmann::json& j) const;
  void write_text(const std::string& name, const std::string& text) const;
  /// Truncates the file.
  std::ofstream open_log(const std::string& name) const;

 private:
  std::filesystem::path path_;
};

/// BO objective: J of the parameter set on the given corpus. space and
/// corpus must outlive the evaluator.
bayesopt::Evaluator make_param_evaluator(const bayesopt::SearchSpace& space,
                                         const scenarios::MovementSet& corpus,
                                         const sim::SimContext& ctx);

struct TuningRun {
  bayesopt::OptResult result;
  controller::MpcParams best;
  double baseline_objective = 0.0;  // J of the seeded hand-tuned point
};

/// The tuning loop of the `optimize` command. history_path enables resume;
/// on_entry sees every evaluation as it happens.
TuningRun run_tuning(const AppConfig& cfg, const World& world,
                     const controller::MpcParams& baseline,
                     const bayesopt::OptimizeHooks& hooks = {});

/// Elementary-effects screening of J over the search space.
bayesopt::MorrisResult run_screening(const AppConfig& cfg, const World& world);

/// Teleop sessions with the baseline and optimized conditions, plus "custom"
/// when given.
SessionFactory make_session_factory(const AppConfig& cfg, const World& world,
                                    const controller::MpcParams& baseline,
                                    const controller::MpcParams& optimized,
                                    const controller::MpcParams* custom = nullptr);

/// Metrics frame producer that also appends each episode to a JSONL log
/// when one is given.
EpisodeHandler make_episode_handler(const sim::SimContext& ctx, std::ostream* log = nullptr);

/// Text summary of a tuning run.
std::string format_tuning(const TuningRun& run, const bayesopt::SearchSpace& space);
std::string format_screening(const bayesopt::MorrisResult& result);

}  // namespace sctune::harness
