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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <json.hpp>

namespace sctune::bayesopt {

/// Diagonal jitter added to every training covariance.
constexpr double kJitter = 1e-6;

struct GpHypers {
  double signal_variance = 1.0;   // sigma_f^2
  Eigen::VectorXd length_scales;  // one per input dimension
  double noise_variance = 1e-4;   // sigma_n^2

  /// [log sigma_f^2, log l_1 .. log l_d, log sigma_n^2]
  Eigen::VectorXd to_log() const;
  static GpHypers from_log(const Eigen::VectorXd& v);
};

/// Anisotropic Matern 5/2 covariance.
double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const GpHypers& h);

struct GpFitOptions {
  int starts = 8;
  std::uint64_t seed = 0;
  int max_iterations = 80;
  double min_length_scale = 1e-2;
  double max_length_scale = 20.0;
  double min_signal_variance = 1e-2;
  double max_signal_variance = 1e2;
  double min_noise_variance = 1e-8;  // floor
  double max_noise_variance = 1.0;
};

/// Log marginal likelihood of standardized targets y at inputs X (rows).
/// When grad is non-null it receives d/d(log hypers) in GpHypers::to_log
/// order. Returns -inf when the covariance is not positive definite.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const GpHypers& h, Eigen::VectorXd* grad = nullptr);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;  // latent function variance, original units
};

/// Zero-mean GP on standardized targets; predictions are returned in the
/// original units. Inputs are expected in the unit cube.
class GpModel {
 public:
  /// Conditions on (X, y) with fixed hyperparameters.
  static GpModel with_hypers(Eigen::MatrixXd X, const Eigen::VectorXd& y,
                             GpHypers h);
  /// Maximizes the log marginal likelihood over log hyperparameters with
  /// multi-start bounded L-BFGS. Constant targets get fixed hyperparameters
  /// with a negligible signal variance.
  static GpModel fit(Eigen::MatrixXd X, const Eigen::VectorXd& y,
                     const GpFitOptions& opts = {});

  Posterior posterior(const Eigen::VectorXd& x) const;

  const GpHypers& hypers() const { return hypers_; }
  const Eigen::MatrixXd& inputs() const { return X_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  bool degenerate() const { return degenerate_; }
  /// At the current hyperparameters, on the standardized targets.
  double log_likelihood() const { return log_likelihood_; }
  int size() const { return static_cast<int>(X_.rows()); }

 private:
  void condition();

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_std_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  bool degenerate_ = false;
  GpHypers hypers_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double log_likelihood_ = 0.0;
};

void to_json(nlohmann::json& j, const GpHypers& h);

}  // namespace sctune::bayesopt
