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

#include "sctune/bayesopt/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sctune::bayesopt {

double expected_improvement(double mean, double sigma, double y_best) {
  const double gap = y_best - mean;
  if (!(sigma >= 1e-12)) return std::max(0.0, gap);
  const double z = gap / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, gap * cdf + sigma * pdf);
}

double expected_improvement(const GpModel& model, const Eigen::VectorXd& unit,
                            double y_best) {
  const Posterior p = model.posterior(unit);
  return expected_improvement(p.mean, std::sqrt(p.variance), y_best);
}

namespace {

struct Scored {
  Eigen::VectorXd unit;
  double ei;
};

// Cyclic coordinate search on snapped points with a shrinking step. Integer
// dimensions move by at least one grid step.
Scored coordinate_descent(const GpModel& model, const SearchSpace& space,
                          double y_best, Scored start, const ProposalOptions& opts) {
  const int d = space.size();
  std::vector<double> min_move(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    const Dimension& dim = space.dims()[static_cast<std::size_t>(i)];
    if (dim.integer) min_move[static_cast<std::size_t>(i)] = 1.0 / (dim.upper - dim.lower);
  }
  double step = opts.initial_step;
  for (int sweep = 0; sweep < opts.max_sweeps && step >= opts.min_step; ++sweep) {
    bool improved = false;
    for (int i = 0; i < d; ++i) {
      const double move = std::max(step, min_move[static_cast<std::size_t>(i)]);
      for (const double sign : {1.0, -1.0}) {
        Eigen::VectorXd trial = start.unit;
        trial[i] = std::clamp(trial[i] + sign * move, 0.0, 1.0);
        trial = space.snap_unit(trial);
        if (trial == start.unit) continue;
        const double ei = expected_improvement(model, trial, y_best);
        if (ei > start.ei) {
          start = {std::move(trial), ei};
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return start;
}

}  // namespace

Proposal propose_next(const GpModel& model, const SearchSpace& space,
                      double y_best, numerics::Rng& rng,
                      const ProposalOptions& opts) {
  const int d = space.size();
  Proposal out;
  std::vector<Scored> scored;
  scored.reserve(static_cast<std::size_t>(opts.candidates));
  for (int c = 0; c < std::max(1, opts.candidates); ++c) {
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.uniform();
    Eigen::VectorXd snapped = space.snap_unit(u);
    const double ei = expected_improvement(model, snapped, y_best);
    out.candidates.push_back(u);
    out.candidate_ei.push_back(ei);
    scored.push_back({std::move(snapped), ei});
  }

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].ei > scored[b].ei;
  });

  Scored best = scored[order.front()];
  const std::size_t polish = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, opts.refine)),
                                                   order.size());
  for (std::size_t r = 0; r < polish; ++r) {
    const Scored refined = coordinate_descent(model, space, y_best, scored[order[r]], opts);
    if (refined.ei > best.ei) best = refined;
  }
  out.unit = best.unit;
  out.raw = space.snap(space.from_unit(best.unit));
  out.ei = best.ei;
  return out;
}

}  // namespace sctune::bayesopt
