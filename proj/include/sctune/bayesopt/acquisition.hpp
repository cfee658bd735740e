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

#include <vector>

#include <Eigen/Core>

#include "sctune/bayesopt/gp.hpp"
#include "sctune/bayesopt/space.hpp"
#include "sctune/numerics/rng.hpp"

namespace sctune::bayesopt {

/// Expected improvement below y_best for a Gaussian N(mean, sigma^2).
/// Falls back to max(0, y_best - mean) when sigma < 1e-12.
double expected_improvement(double mean, double sigma, double y_best);

/// EI of the model's posterior at a unit-cube point.
double expected_improvement(const GpModel& model, const Eigen::VectorXd& unit,
                            double y_best);

struct ProposalOptions {
  int candidates = 512;
  int refine = 8;          // best candidates polished by coordinate descent
  int max_sweeps = 30;
  double initial_step = 0.1;  // unit-cube units
  double min_step = 1e-3;
};

struct Proposal {
  Eigen::VectorXd unit;  // snapped
  Eigen::VectorXd raw;   // snapped, admissible
  double ei = 0.0;
  /// The random candidates (unit cube, before snapping) and the EI of their
  /// snapped images.
  std::vector<Eigen::VectorXd> candidates;
  std::vector<double> candidate_ei;
};

/// Maximizes EI over the space. Every point is snapped (integers rounded,
/// repair applied) before EI is evaluated, so the returned point is the
/// evaluated one.
Proposal propose_next(const GpModel& model, const SearchSpace& space,
                      double y_best, numerics::Rng& rng,
                      const ProposalOptions& opts = {});

}  // namespace sctune::bayesopt
