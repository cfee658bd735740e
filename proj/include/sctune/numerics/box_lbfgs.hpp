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

#include <functional>

#include <Eigen/Core>

namespace sctune::numerics {

struct BoxLbfgsOptions {
  int max_iterations = 100;
  int memory = 8;
  /// Stop when the infinity norm of the projected gradient falls below this.
  double gradient_tolerance = 1e-8;
  /// Stop when an accepted step decreases f by less than this (relative).
  double relative_tolerance = 1e-12;
  int max_line_search = 40;
  double armijo = 1e-4;
  /// Infinity-norm cap on the first (steepest-descent) trial step.
  double initial_step = 1.0;
};

struct BoxLbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double projected_gradient = 0.0;
};

/// f(x, grad) returns the objective and writes the gradient into grad.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Projected limited-memory BFGS for box-constrained minimization. Variables
/// at an active bound are frozen for the quasi-Newton direction; every
/// accepted step satisfies the Armijo condition, so the objective is
/// non-increasing across iterations. Deterministic.
BoxLbfgsResult minimize_box(const Objective& f, Eigen::VectorXd x0,
                            const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper,
                            const BoxLbfgsOptions& options = {});

}  // namespace sctune::numerics
