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

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "sctune/controller/mpc.hpp"
#include "sctune/scenarios/movements.hpp"
#include "sctune/sim/simulator.hpp"

namespace sctune::harness {

struct SampleSummary {
  double mean = 0.0;
  double half_width = 0.0;  // 95% t interval
  int n = 0;
};

struct MetricComparison {
  std::string name;
  bool higher_is_better = false;
  SampleSummary a;
  SampleSummary b;
  /// One-tailed Welch p-value for "condition B improves on A" in the
  /// metric's better direction.
  double p = 0.5;
};

struct ConditionSummary {
  std::string label;
  controller::MpcParams params;
  double objective = 0.0;       // J including the failure rule
  double mean_objective = 0.0;  // plain mean of per-movement objectives
  int n_succ = 0;
  double infeasible_rate = 0.0;  // mean per-movement infeasible fraction
  double min_sd = 0.0;           // worst over all movements
};

struct ComparisonReport {
  int n_mov = 0;
  ConditionSummary a;
  ConditionSummary b;
  /// d_ob, t_ob, f_ps, f_cc, f_vs, t_C, then the per-movement objective.
  std::vector<MetricComparison> rows;

  /// (J_a - J_b) / J_a.
  double relative_improvement() const;
};

ComparisonReport build_report(const sim::EvalResult& a, const sim::EvalResult& b,
                              const std::string& label_a, const std::string& label_b);

/// Runs both parameter sets on the same corpus and reports on them. The
/// evaluations are returned through the optional out-parameters for logging.
ComparisonReport compare(const controller::MpcParams& a, const controller::MpcParams& b,
                         const scenarios::MovementSet& corpus, const sim::SimContext& ctx,
                         const std::string& label_a = "baseline",
                         const std::string& label_b = "optimized",
                         sim::EvalResult* eval_a = nullptr,
                         sim::EvalResult* eval_b = nullptr);

std::string format_report(const ComparisonReport& r);

void to_json(nlohmann::json& j, const SampleSummary& s);
void to_json(nlohmann::json& j, const MetricComparison& m);
void to_json(nlohmann::json& j, const ConditionSummary& c);
void to_json(nlohmann::json& j, const ComparisonReport& r);

}  // namespace sctune::harness
