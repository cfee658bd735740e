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
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "sctune/bayesopt/acquisition.hpp"
#include "sctune/bayesopt/gp.hpp"
#include "sctune/bayesopt/space.hpp"
#include "sctune/numerics/rng.hpp"

namespace sctune::bayesopt {

struct BoConfig {
  int n_init = 8;   // Latin hypercube points
  int n_max = 40;   // BO iterations after the initial design
  std::uint64_t seed = 1;
  ProposalOptions proposal;
  GpFitOptions gp;

  void validate() const;
};

struct Observation {
  double objective = 0.0;
  bool feasible = true;
  nlohmann::json details;  // evaluator-specific record, stored verbatim
};

/// Maps an admissible raw point to its observation. May throw; optimize
/// persists the history before propagating.
using Evaluator = std::function<Observation(const Eigen::VectorXd& raw)>;

struct HistoryEntry {
  int index = 0;
  std::string phase;  // "seed", "init" or "bo"
  Eigen::VectorXd raw;
  double objective = 0.0;
  bool feasible = true;
  double incumbent = 0.0;  // best objective up to and including this entry
  int incumbent_index = 0;
  double ei = 0.0;  // acquisition value at proposal time ("bo" only)
  nlohmann::json hypers;  // surrogate used for the proposal ("bo" only)
  nlohmann::json details;
};

struct OptResult {
  std::vector<HistoryEntry> history;
  int best_index = -1;

  const HistoryEntry& best() const;
};

/// n points stratified per dimension in [0, 1]^d.
std::vector<Eigen::VectorXd> latin_hypercube(int n, int d, numerics::Rng& rng);

struct OptimizeHooks {
  /// JSON history file rewritten after every evaluation; entries already in
  /// it are reused instead of re-evaluated.
  std::string history_path;
  std::function<void(const HistoryEntry&)> on_entry;
};

/// Seed points (e.g. the hand-tuned parameters) are evaluated first, then a
/// Latin hypercube of n_init points, then n_max rounds of fit -> propose ->
/// evaluate. Every stochastic step draws from a stream derived from (seed,
/// step), so a resumed run replays the same points.
OptResult optimize(const BoConfig& cfg, const SearchSpace& space,
                   const Evaluator& evaluate,
                   const std::vector<Eigen::VectorXd>& seed_points = {},
                   const OptimizeHooks& hooks = {});

nlohmann::json history_to_json(const OptResult& result, const BoConfig& cfg,
                               const SearchSpace& space);
OptResult history_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const HistoryEntry& e);
void from_json(const nlohmann::json& j, HistoryEntry& e);
void to_json(nlohmann::json& j, const BoConfig& c);
void from_json(const nlohmann::json& j, BoConfig& c);

}  // namespace sctune::bayesopt
