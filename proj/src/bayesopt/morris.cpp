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

#include "sctune/bayesopt/morris.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sctune/numerics/rng.hpp"

namespace sctune::bayesopt {

void MorrisOptions::validate() const {
  if (trajectories < 2) throw std::invalid_argument("Morris screening needs r >= 2");
  if (levels < 2) throw std::invalid_argument("Morris screening needs p >= 2");
}

double MorrisOptions::delta() const {
  return static_cast<double>(levels) / (2.0 * (levels - 1));
}

MorrisResult elementary_effects(const SearchSpace& space,
                                const std::function<double(const Eigen::VectorXd&)>& f,
                                const MorrisOptions& opts) {
  opts.validate();
  const int d = space.size();
  const double delta = opts.delta();
  const double grid = 1.0 / (opts.levels - 1);
  // Base levels from which +delta stays inside the cube.
  std::vector<double> base_levels;
  for (int l = 0; l < opts.levels; ++l) {
    if (l * grid + delta <= 1.0 + 1e-12) base_levels.push_back(l * grid);
  }
  if (base_levels.empty()) throw std::invalid_argument("no admissible Morris base level");

  numerics::Rng rng(opts.seed);
  std::vector<std::vector<double>> effects(static_cast<std::size_t>(d));
  MorrisResult out;
  const auto eval = [&](const Eigen::VectorXd& unit) {
    ++out.evaluations;
    return f(space.snap(space.from_unit(unit)));
  };

  for (int t = 0; t < opts.trajectories; ++t) {
    Eigen::VectorXd x(d);
    std::vector<double> sign(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const double base = base_levels[static_cast<std::size_t>(rng.below(base_levels.size()))];
      const bool up = rng.uniform() < 0.5;
      sign[static_cast<std::size_t>(i)] = up ? 1.0 : -1.0;
      x[i] = up ? base : base + delta;
    }
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    double fx = eval(x);
    for (const int i : order) {
      const double s = sign[static_cast<std::size_t>(i)];
      x[i] = std::clamp(x[i] + s * delta, 0.0, 1.0);
      const double fn = eval(x);
      effects[static_cast<std::size_t>(i)].push_back(s * (fn - fx));
      fx = fn;
    }
  }

  for (int i = 0; i < d; ++i) {
    const auto& e = effects[static_cast<std::size_t>(i)];
    EffectSummary s;
    s.name = space.dims()[static_cast<std::size_t>(i)].name;
    s.samples = static_cast<int>(e.size());
    double abs_sum = 0.0;
    double sum = 0.0;
    for (double v : e) {
      abs_sum += std::abs(v);
      sum += v;
    }
    s.mu_star = abs_sum / s.samples;
    s.mu = sum / s.samples;
    double ss = 0.0;
    for (double v : e) ss += (v - s.mu) * (v - s.mu);
    s.sigma = s.samples > 1 ? std::sqrt(ss / (s.samples - 1)) : 0.0;
    out.effects.push_back(std::move(s));
  }
  out.ranking.resize(static_cast<std::size_t>(d));
  std::iota(out.ranking.begin(), out.ranking.end(), 0);
  std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](int a, int b) {
    return out.effects[static_cast<std::size_t>(a)].mu_star >
           out.effects[static_cast<std::size_t>(b)].mu_star;
  });
  return out;
}

void to_json(nlohmann::json& j, const EffectSummary& e) {
  j = {{"name", e.name}, {"mu_star", e.mu_star}, {"mu", e.mu},
       {"sigma", e.sigma}, {"samples", e.samples}};
}

void to_json(nlohmann::json& j, const MorrisResult& r) {
  std::vector<std::string> ranking;
  for (int i : r.ranking) ranking.push_back(r.effects[static_cast<std::size_t>(i)].name);
  j = {{"effects", r.effects}, {"ranking", ranking}, {"evaluations", r.evaluations}};
}

}  // namespace sctune::bayesopt
