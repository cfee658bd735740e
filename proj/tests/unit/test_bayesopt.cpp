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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include "oracles.hpp"
#include "sctune/bayesopt/acquisition.hpp"
#include "sctune/bayesopt/gp.hpp"
#include "sctune/bayesopt/morris.hpp"
#include "sctune/bayesopt/optimizer.hpp"
#include "sctune/bayesopt/space.hpp"

using namespace sctune;
using namespace sctune::testing;
using bayesopt::GpHypers;

namespace {

bayesopt::SearchSpace unit_square() {
  return bayesopt::SearchSpace({{"x", 0.0, 1.0, false}, {"y", 0.0, 1.0, false}});
}

double bowl(const Eigen::VectorXd& p) {
  return (p[0] - 0.3) * (p[0] - 0.3) + (p[1] - 0.7) * (p[1] - 0.7);
}

bayesopt::Evaluator bowl_evaluator(int* calls = nullptr) {
  return [calls](const Eigen::VectorXd& p) {
    if (calls != nullptr) ++*calls;
    bayesopt::Observation o;
    o.objective = bowl(p);
    return o;
  };
}

bayesopt::BoConfig small_config(int n_init, int n_max) {
  bayesopt::BoConfig cfg;
  cfg.n_init = n_init;
  cfg.n_max = n_max;
  cfg.seed = 3;
  cfg.proposal.candidates = 128;
  cfg.gp.starts = 3;
  return cfg;
}

}  // namespace

TEST_SUITE("bayesopt") {
  TEST_CASE("matern kernel matches the closed form") {
    numerics::Rng rng(51);
    for (int i = 0; i < 100; ++i) {
      const GpHypers h = random_hypers(rng, 3);
      const Eigen::VectorXd a = random_inputs(rng, 1, 3).row(0);
      const Eigen::VectorXd b = random_inputs(rng, 1, 3).row(0);
      CHECK(bayesopt::matern52(a, b, h) == doctest::Approx(matern_oracle(a, b, h)).epsilon(1e-14));
    }
    GpHypers h;
    h.signal_variance = 2.5;
    h.length_scales = Eigen::VectorXd::Ones(2);
    CHECK(bayesopt::matern52(Eigen::Vector2d(0.3, 0.3), Eigen::Vector2d(0.3, 0.3), h) == 2.5);
  }

  TEST_CASE("posterior matches the direct-inverse formulas") {
    numerics::Rng rng(52);
    double worst_mean = 0.0;
    double worst_var = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 1 + static_cast<int>(rng.below(4));
      const int n = 2 + static_cast<int>(rng.below(9));
      const Eigen::MatrixXd X = random_inputs(rng, n, d);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i) y[i] = rng.uniform(-2.0, 5.0);
      const GpHypers h = random_hypers(rng, d);
      const bayesopt::GpModel gp = bayesopt::GpModel::with_hypers(X, y, h);

      for (int q = 0; q < 5; ++q) {
        const Eigen::VectorXd x = random_inputs(rng, 1, d).row(0);
        const PosteriorOracle o = posterior_oracle(X, y, h, x);
        const double mean = o.mean;
        const double var = o.variance;
        const bayesopt::Posterior p = gp.posterior(x);
        worst_mean = std::max(worst_mean, std::abs(p.mean - mean) / std::max(1.0, std::abs(mean)));
        worst_var = std::max(worst_var, std::abs(p.variance - var) / std::max(1.0, var));
      }
    }
    CHECK(worst_mean < 1e-8);
    CHECK(worst_var < 1e-8);
  }

  TEST_CASE("posterior interpolates low-noise training points") {
    numerics::Rng rng(53);
    const Eigen::MatrixXd X = random_inputs(rng, 6, 2);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y[i] = bowl(X.row(i));
    GpHypers h;
    h.length_scales = Eigen::VectorXd::Constant(2, 0.5);
    h.noise_variance = 1e-10;
    const bayesopt::GpModel gp = bayesopt::GpModel::with_hypers(X, y, h);
    for (int i = 0; i < 6; ++i) {
      const bayesopt::Posterior p = gp.posterior(X.row(i));
      CHECK(p.mean == doctest::Approx(y[i]).epsilon(1e-4));
      CHECK(p.variance >= 0.0);
      CHECK(p.variance < 1e-4 * gp.y_scale() * gp.y_scale());
    }
  }

  TEST_CASE("log marginal likelihood and its gradient") {
    numerics::Rng rng(54);
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 1 + static_cast<int>(rng.below(3));
      const int n = 3 + static_cast<int>(rng.below(8));
      const Eigen::MatrixXd X = random_inputs(rng, n, d);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i) y[i] = rng.uniform(-1.5, 1.5);
      // Well-conditioned covariances keep the finite differences meaningful.
      const GpHypers h = random_hypers(rng, d, -3.0);
      Eigen::VectorXd grad;
      const double value = bayesopt::log_marginal_likelihood(X, y, h, &grad);
      CHECK(value == doctest::Approx(lml_oracle(X, y, h)).epsilon(1e-8));
      const Eigen::VectorXd theta = h.to_log();
      REQUIRE(grad.size() == theta.size());
      const double step = 1e-6;
      for (int k = 0; k < theta.size(); ++k) {
        Eigen::VectorXd up = theta;
        Eigen::VectorXd dn = theta;
        up[k] += step;
        dn[k] -= step;
        const double fd = (bayesopt::log_marginal_likelihood(X, y, GpHypers::from_log(up)) -
                           bayesopt::log_marginal_likelihood(X, y, GpHypers::from_log(dn))) /
                          (2 * step);
        CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }

  TEST_CASE("hyperparameter fit stays in bounds and beats the start point") {
    numerics::Rng rng(55);
    const Eigen::MatrixXd X = random_inputs(rng, 12, 2);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y[i] = std::sin(4.0 * X(i, 0)) + 0.2 * X(i, 1);
    const bayesopt::GpFitOptions opts;
    const bayesopt::GpModel gp = bayesopt::GpModel::fit(X, y, opts);
    const GpHypers& h = gp.hypers();
    CHECK(h.signal_variance >= opts.min_signal_variance * (1 - 1e-12));
    CHECK(h.signal_variance <= opts.max_signal_variance * (1 + 1e-12));
    for (int k = 0; k < 2; ++k) {
      CHECK(h.length_scales[k] >= opts.min_length_scale * (1 - 1e-12));
      CHECK(h.length_scales[k] <= opts.max_length_scale * (1 + 1e-12));
    }
    CHECK(h.noise_variance >= opts.min_noise_variance * (1 - 1e-12));
    GpHypers start;
    start.length_scales = Eigen::VectorXd::Constant(2, 0.5);
    const bayesopt::GpModel ref = bayesopt::GpModel::with_hypers(X, y, start);
    CHECK(gp.log_likelihood() >= ref.log_likelihood() - 1e-9);

    const bayesopt::GpModel flat = bayesopt::GpModel::fit(X, Eigen::VectorXd::Constant(12, 0.4));
    CHECK(flat.degenerate());
    CHECK(flat.posterior(Eigen::Vector2d(0.5, 0.5)).mean == doctest::Approx(0.4));
  }

  TEST_CASE("expected improvement matches numerical integration") {
    numerics::Rng rng(56);
    using boost::math::quadrature::gauss_kronrod;
    for (int i = 0; i < 50; ++i) {
      const double mean = rng.uniform(-1.0, 1.0);
      const double sigma = rng.uniform(0.01, 1.0);
      const double best = mean + sigma * rng.uniform(-2.5, 2.5);
      const auto integrand = [&](double y) {
        const double z = (y - mean) / sigma;
        return (best - y) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
      };
      const double lo = mean - 14.0 * sigma;
      const double oracle = best > lo ? gauss_kronrod<double, 61>::integrate(integrand, lo, best, 15, 1e-13) : 0.0;
      CHECK(bayesopt::expected_improvement(mean, sigma, best) ==
            doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(bayesopt::expected_improvement(0.3, 0.0, 0.5) == doctest::Approx(0.2));
    CHECK(bayesopt::expected_improvement(0.7, 0.0, 0.5) == 0.0);
    CHECK(bayesopt::expected_improvement(0.0, 1.0, 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
  }

  TEST_CASE("expected improvement agrees with stratified Monte Carlo sampling") {
    numerics::Rng rng(57);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double mean = rng.uniform(-1.0, 1.0);
      const double sigma = rng.uniform(0.05, 1.0);
      const double best = mean + sigma * rng.uniform(-2.0, 2.0);
      const double mc = ei_monte_carlo(mean, sigma, best, 100000, rng);
      worst = std::max(worst, std::abs(bayesopt::expected_improvement(mean, sigma, best) - mc) / mc);
    }
    CHECK(worst < 1e-3);
  }

  TEST_CASE("parameter space snapping and repair") {
    const bayesopt::SearchSpace space = bayesopt::mpc_param_space();
    REQUIRE(space.size() == 7);
    CHECK(space.dims()[0].name == "Np");
    CHECK(space.dims()[0].integer);
    CHECK(space.dims()[1].integer);
    Eigen::VectorXd raw(7);
    raw << 12.4, 30.6, 0.5, 20.0, 1.0, 3.0, 50.0;
    const Eigen::VectorXd snapped = space.snap(raw);
    CHECK(snapped[0] == 12.0);
    CHECK(snapped[1] == 12.0);  // Nc <= Np
    CHECK(snapped[3] == space.dims()[3].upper);
    CHECK(snapped[6] == space.dims()[6].upper);
    CHECK(space.contains(snapped));
    CHECK_FALSE(space.contains(raw));
    const controller::MpcParams p = bayesopt::vector_to_params(snapped);
    CHECK_NOTHROW(p.validate());
    CHECK((bayesopt::params_to_vector(p) - snapped).norm() == 0.0);

    numerics::Rng rng(58);
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd u(7);
      for (int k = 0; k < 7; ++k) u[k] = rng.uniform();
      const Eigen::VectorXd s = space.snap_unit(u);
      CHECK((space.snap_unit(s) - s).norm() < 1e-12);
      const Eigen::VectorXd r = space.from_unit(s);
      CHECK(r[1] <= r[0] + 1e-9);
      CHECK(std::abs(r[0] - std::round(r[0])) < 1e-9);
    }
    CHECK_THROWS(space.index_of("missing"));
    CHECK(space.index_of("c2") == 6);
  }

  TEST_CASE("latin hypercube hits every stratum once per dimension") {
    numerics::Rng rng(59);
    for (const int n : {1, 5, 16}) {
      const auto pts = bayesopt::latin_hypercube(n, 4, rng);
      REQUIRE(pts.size() == static_cast<std::size_t>(n));
      for (int k = 0; k < 4; ++k) {
        std::vector<int> bins;
        for (const auto& p : pts) {
          CHECK(p[k] >= 0.0);
          CHECK(p[k] < 1.0);
          bins.push_back(static_cast<int>(std::floor(p[k] * n)));
        }
        std::sort(bins.begin(), bins.end());
        for (int i = 0; i < n; ++i) CHECK(bins[static_cast<std::size_t>(i)] == i);
      }
    }
  }

  TEST_CASE("proposals are snapped and never worse than the candidates") {
    numerics::Rng rng(60);
    const bayesopt::SearchSpace space = bayesopt::mpc_param_space();
    std::vector<Eigen::VectorXd> pts = bayesopt::latin_hypercube(8, 7, rng);
    Eigen::MatrixXd X(8, 7);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
      X.row(i) = space.snap_unit(pts[static_cast<std::size_t>(i)]);
      y[i] = X.row(i).squaredNorm();
    }
    const bayesopt::GpModel gp = bayesopt::GpModel::fit(X, y);
    bayesopt::ProposalOptions opts;
    opts.candidates = 64;
    const bayesopt::Proposal p = bayesopt::propose_next(gp, space, y.minCoeff(), rng, opts);
    CHECK(space.contains(p.raw));
    CHECK((space.snap(p.raw) - p.raw).norm() == 0.0);
    CHECK(p.candidates.size() == 64);
    CHECK(p.ei >= *std::max_element(p.candidate_ei.begin(), p.candidate_ei.end()));
    CHECK(p.ei == doctest::Approx(bayesopt::expected_improvement(gp, p.unit, y.minCoeff())));
  }

  TEST_CASE("optimization is reproducible from the seed") {
    const auto a = bayesopt::optimize(small_config(4, 5), unit_square(), bowl_evaluator());
    const auto b = bayesopt::optimize(small_config(4, 5), unit_square(), bowl_evaluator());
    REQUIRE(a.history.size() == 9);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history[i].raw == b.history[i].raw);
      CHECK(a.history[i].objective == b.history[i].objective);
    }
    CHECK(a.best_index == b.best_index);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.history[i].phase == "init");
    double incumbent = 1e300;
    for (const auto& e : a.history) {
      incumbent = std::min(incumbent, e.objective);
      CHECK(e.incumbent == incumbent);
    }
  }

  TEST_CASE("seed points are evaluated first") {
    const Eigen::Vector2d seed(0.3, 0.7);
    const auto r = bayesopt::optimize(small_config(3, 1), unit_square(), bowl_evaluator(), {seed});
    REQUIRE(r.history.size() == 5);
    CHECK(r.history[0].phase == "seed");
    CHECK(r.history[0].raw == Eigen::VectorXd(seed));
    CHECK(r.best_index == 0);
    CHECK(r.best().objective == 0.0);
  }

  TEST_CASE("resuming from a history file replays without re-evaluating") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "sctune_bo_resume";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    bayesopt::OptimizeHooks hooks;
    hooks.history_path = (dir / "history.json").string();

    int first_calls = 0;
    const auto partial = bayesopt::optimize(small_config(4, 3), unit_square(), bowl_evaluator(&first_calls), {}, hooks);
    CHECK(first_calls == 7);
    int resumed_calls = 0;
    const auto resumed = bayesopt::optimize(small_config(4, 6), unit_square(), bowl_evaluator(&resumed_calls), {}, hooks);
    CHECK(resumed_calls == 3);
    const auto fresh = bayesopt::optimize(small_config(4, 6), unit_square(), bowl_evaluator());
    REQUIRE(resumed.history.size() == fresh.history.size());
    for (std::size_t i = 0; i < fresh.history.size(); ++i) {
      CHECK((resumed.history[i].raw - fresh.history[i].raw).norm() < 1e-12);
    }
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("history json round trip") {
    const auto r = bayesopt::optimize(small_config(3, 2), unit_square(), bowl_evaluator());
    const nlohmann::json j = bayesopt::history_to_json(r, small_config(3, 2), unit_square());
    const auto back = bayesopt::history_from_json(j);
    REQUIRE(back.history.size() == r.history.size());
    CHECK(back.best_index == r.best_index);
    for (std::size_t i = 0; i < r.history.size(); ++i) CHECK(back.history[i].raw == r.history[i].raw);
  }

  TEST_CASE("finds the minimum of a smooth bowl") {
    const auto r = bayesopt::optimize(small_config(5, 20), unit_square(), bowl_evaluator());
    CHECK(r.best().objective < 2.5e-3);
    CHECK(std::abs(r.best().raw[0] - 0.3) < 0.05);
    CHECK(std::abs(r.best().raw[1] - 0.7) < 0.05);
  }

  TEST_CASE("elementary effects of a linear function are exact") {
    const bayesopt::SearchSpace space({{"a", 0.0, 2.0, false}, {"b", -1.0, 1.0, false}, {"c", 5.0, 10.0, false}});
    const Eigen::Vector3d slope(3.0, -0.5, 0.1);
    const auto f = [&](const Eigen::VectorXd& x) { return slope.dot(x); };
    bayesopt::MorrisOptions opts;
    opts.trajectories = 6;
    opts.levels = 4;
    const bayesopt::MorrisResult r = bayesopt::elementary_effects(space, f, opts);
    CHECK(r.evaluations == 6 * 4);
    const double delta = opts.delta();
    CHECK(delta == doctest::Approx(4.0 / 6.0));
    for (int k = 0; k < 3; ++k) {
      const auto& dim = space.dims()[static_cast<std::size_t>(k)];
      const double effect = slope[k] * delta * (dim.upper - dim.lower);
      CHECK(r.effects[static_cast<std::size_t>(k)].mu == doctest::Approx(effect).epsilon(1e-12));
      CHECK(r.effects[static_cast<std::size_t>(k)].mu_star == doctest::Approx(std::abs(effect)).epsilon(1e-12));
      CHECK(r.effects[static_cast<std::size_t>(k)].sigma < 1e-12);
      CHECK(r.effects[static_cast<std::size_t>(k)].samples == 6);
    }
    CHECK(r.ranking == std::vector<int>{0, 1, 2});
  }

  TEST_CASE("elementary effects detect interaction spread") {
    const bayesopt::SearchSpace space({{"a", 0.0, 1.0, false}, {"b", 0.0, 1.0, false}});
    const auto f = [](const Eigen::VectorXd& x) { return x[0] * x[1]; };
    bayesopt::MorrisOptions opts;
    opts.trajectories = 20;
    const bayesopt::MorrisResult r = bayesopt::elementary_effects(space, f, opts);
    CHECK(r.effects[0].sigma > 0.0);
    CHECK(r.effects[1].sigma > 0.0);
    CHECK_THROWS(bayesopt::MorrisOptions{0, 4, 1}.validate());
  }
}
