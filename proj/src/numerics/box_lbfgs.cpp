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

#include "sctune/numerics/box_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace sctune::numerics {
namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace

BoxLbfgsResult minimize_box(const Objective& f, Eigen::VectorXd x0,
                            const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper,
                            const BoxLbfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BoxLbfgsResult result;
  Eigen::VectorXd x = project(x0, lower, upper);
  Eigen::VectorXd g(n);
  double fx = f(x, g);
  result.evaluations = 1;

  std::deque<CurvaturePair> history;
  Eigen::VectorXd g_new(n);
  Eigen::VectorXd d(n);
  std::vector<double> alpha(static_cast<std::size_t>(options.memory));

  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd pg = project(x - g, lower, upper) - x;
    result.projected_gradient = pg.lpNorm<Eigen::Infinity>();
    if (result.projected_gradient <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Variables pinned at a bound with the gradient pushing outward.
    Eigen::Array<bool, Eigen::Dynamic, 1> active(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      active[i] = (x[i] <= lower[i] && g[i] > 0.0) ||
                  (x[i] >= upper[i] && g[i] < 0.0);
    }

    d = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i]) d[i] = 0.0;
    }
    const int m = static_cast<int>(history.size());
    for (int k = m - 1; k >= 0; --k) {
      alpha[k] = history[k].rho * history[k].s.dot(d);
      d -= alpha[k] * history[k].y;
    }
    if (m > 0) {
      const auto& last = history.back();
      d *= last.s.dot(last.y) / last.y.squaredNorm();
    } else {
      d *= options.initial_step / std::max(options.initial_step, g.lpNorm<Eigen::Infinity>());
    }
    for (int k = 0; k < m; ++k) {
      const double beta = history[k].rho * history[k].y.dot(d);
      d += (alpha[k] - beta) * history[k].s;
    }
    d = -d;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i]) d[i] = 0.0;
    }
    if (!(g.dot(d) < 0.0)) {
      history.clear();
      d = -pg;
    }

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new(n);
    double f_new = fx;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      x_new = project(x + t * d, lower, upper);
      const double decrease = g.dot(x_new - x);
      if (decrease >= 0.0) {
        t *= 0.5;
        continue;
      }
      f_new = f(x_new, g_new);
      ++result.evaluations;
      if (std::isfinite(f_new) && f_new <= fx + options.armijo * decrease) {
        accepted = true;
        break;
      }
      // Safeguarded quadratic model along the (projected) path.
      double next = 0.5 * t;
      if (std::isfinite(f_new)) {
        const double slope = decrease / t;
        const double curvature = f_new - fx - decrease;
        if (curvature > 0.0) next = -slope * t * t / (2.0 * curvature);
      }
      t = std::clamp(next, 0.1 * t, 0.5 * t);
    }
    result.iterations = it + 1;
    if (!accepted) break;

    CurvaturePair pair{x_new - x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.s.norm() * pair.y.norm() && sy > 0.0) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > options.memory) {
        history.pop_front();
      }
    }
    const double improvement = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (improvement <= options.relative_tolerance * std::max(1.0, std::abs(fx))) {
      const Eigen::VectorXd pg_end = project(x - g, lower, upper) - x;
      result.projected_gradient = pg_end.lpNorm<Eigen::Infinity>();
      result.converged =
          result.projected_gradient <= options.gradient_tolerance;
      break;
    }
  }
  result.x = std::move(x);
  result.value = fx;
  return result;
}

}  // namespace sctune::numerics
