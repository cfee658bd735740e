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

#include "sctune/bayesopt/space.hpp"

namespace sctune::bayesopt {

struct MorrisOptions {
  int trajectories = 10;  // r
  int levels = 4;         // p
  std::uint64_t seed = 1;

  void validate() const;
  /// Step in unit-cube units: p / (2 (p - 1)).
  double delta() const;
};

struct EffectSummary {
  std::string name;
  double mu_star = 0.0;  // mean |effect|
  double mu = 0.0;       // mean effect
  double sigma = 0.0;    // sample standard deviation of the effects
  int samples = 0;
};

struct MorrisResult {
  std::vector<EffectSummary> effects;  // space order
  std::vector<int> ranking;            // dimension indices by decreasing mu*
  int evaluations = 0;
};

/// One-at-a-time screening. Each trajectory starts on the p-level grid and
/// moves every dimension once by +/-delta in random order; an effect is the
/// output change for a +delta move of that dimension (raw difference, not
/// divided by the step). Points are snapped before evaluation.
MorrisResult elementary_effects(const SearchSpace& space,
                                const std::function<double(const Eigen::VectorXd&)>& f,
                                const MorrisOptions& opts);

void to_json(nlohmann::json& j, const EffectSummary& e);
void to_json(nlohmann::json& j, const MorrisResult& r);

}  // namespace sctune::bayesopt
