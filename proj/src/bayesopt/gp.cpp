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

#include "sctune/bayesopt/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sctune/numerics/box_lbfgs.hpp"
#include "sctune/numerics/rng.hpp"

namespace sctune::bayesopt {
namespace {

const double kSqrt5 = std::sqrt(5.0);

double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& ls) {
  return std::sqrt(((a - b).array() / ls.array()).square().sum());
}

double matern_shape(double r) {
  return (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * std::exp(-kSqrt5 * r);
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& X, const GpHypers& h) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = h.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      K(i, j) = K(j, i) = matern52(X.row(i).transpose(), X.row(j).transpose(), h);
    }
  }
  return K;
}

}  // namespace

Eigen::VectorXd GpHypers::to_log() const {
  const Eigen::Index d = length_scales.size();
  Eigen::VectorXd v(d + 2);
  v[0] = std::log(signal_variance);
  v.segment(1, d) = length_scales.array().log().matrix();
  v[d + 1] = std::log(noise_variance);
  return v;
}

GpHypers GpHypers::from_log(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size() - 2;
  GpHypers h;
  h.signal_variance = std::exp(v[0]);
  h.length_scales = v.segment(1, d).array().exp().matrix();
  h.noise_variance = std::exp(v[d + 1]);
  return h;
}

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const GpHypers& h) {
  return h.signal_variance * matern_shape(scaled_distance(a, b, h.length_scales));
}

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const GpHypers& h, Eigen::VectorXd* grad) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::MatrixXd K = covariance(X, h);
  Eigen::MatrixXd Ky = K;
  Ky.diagonal().array() += h.noise_variance + kJitter;
  const Eigen::LLT<Eigen::MatrixXd> llt(Ky);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double value = -0.5 * y.dot(alpha) - 0.5 * log_det -
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (grad == nullptr) return value;

  // d LML / d theta = 0.5 tr((alpha alpha^T - Ky^-1) dK/dtheta)
  const Eigen::MatrixXd A =
      alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
  grad->setZero(d + 2);
  (*grad)[0] = 0.5 * (A.cwiseProduct(K)).sum();
  (*grad)[d + 1] = 0.5 * h.noise_variance * A.trace();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const Eigen::ArrayXd scaled =
          (X.row(i) - X.row(j)).transpose().array() / h.length_scales.array();
      const double r = std::sqrt(scaled.square().sum());
      // dk/dlog(l_d) = sigma_f^2 (5/3) (1 + sqrt5 r) e^{-sqrt5 r} (dx_d / l_d)^2
      const double common = h.signal_variance * (5.0 / 3.0) * (1.0 + kSqrt5 * r) *
                            std::exp(-kSqrt5 * r);
      // Symmetric pair (i, j) and (j, i).
      grad->segment(1, d) += (A(i, j) * common) * scaled.square().matrix();
    }
  }
  return value;
}

GpModel GpModel::with_hypers(Eigen::MatrixXd X, const Eigen::VectorXd& y,
                             GpHypers h) {
  if (X.rows() < 1 || X.rows() != y.size()) {
    throw std::invalid_argument("GP needs matching inputs and targets");
  }
  if (h.length_scales.size() != X.cols()) {
    throw std::invalid_argument("GP length scales must match the input dimension");
  }
  GpModel m;
  m.X_ = std::move(X);
  m.y_mean_ = y.mean();
  const double var =
      y.size() > 1 ? (y.array() - m.y_mean_).square().sum() / static_cast<double>(y.size() - 1)
                   : 0.0;
  m.degenerate_ = !(var > 1e-24);
  m.y_scale_ = m.degenerate_ ? 1.0 : std::sqrt(var);
  m.y_std_ = (y.array() - m.y_mean_) / m.y_scale_;
  m.hypers_ = std::move(h);
  m.condition();
  return m;
}

GpModel GpModel::fit(Eigen::MatrixXd X, const Eigen::VectorXd& y,
                     const GpFitOptions& opts) {
  const Eigen::Index d = X.cols();
  GpHypers start;
  start.signal_variance = 1.0;
  start.length_scales = Eigen::VectorXd::Constant(d, 0.3);
  start.noise_variance = 1e-3;
  GpModel model = with_hypers(std::move(X), y, start);
  if (model.degenerate_) {
    GpHypers fixed = start;
    fixed.signal_variance = opts.min_signal_variance * 1e-4;
    fixed.noise_variance = opts.min_noise_variance;
    model.hypers_ = fixed;
    model.condition();
    return model;
  }

  Eigen::VectorXd lower(d + 2);
  Eigen::VectorXd upper(d + 2);
  lower[0] = std::log(opts.min_signal_variance);
  upper[0] = std::log(opts.max_signal_variance);
  lower.segment(1, d).setConstant(std::log(opts.min_length_scale));
  upper.segment(1, d).setConstant(std::log(opts.max_length_scale));
  lower[d + 1] = std::log(opts.min_noise_variance);
  upper[d + 1] = std::log(opts.max_noise_variance);

  const Eigen::MatrixXd& Xs = model.X_;
  const Eigen::VectorXd& ys = model.y_std_;
  const numerics::Objective negative_lml = [&](const Eigen::VectorXd& v,
                                               Eigen::VectorXd& g) {
    Eigen::VectorXd grad;
    const double value = log_marginal_likelihood(Xs, ys, GpHypers::from_log(v), &grad);
    if (!std::isfinite(value)) {
      g.setZero(v.size());
      return std::numeric_limits<double>::infinity();
    }
    g = -grad;
    return -value;
  };

  numerics::BoxLbfgsOptions lbfgs;
  lbfgs.max_iterations = opts.max_iterations;
  lbfgs.gradient_tolerance = 1e-5;
  lbfgs.relative_tolerance = 1e-10;

  numerics::Rng rng(opts.seed);
  Eigen::VectorXd best = start.to_log().cwiseMax(lower).cwiseMin(upper);
  double best_value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd x0(d + 2);
    if (s == 0) {
      x0 = start.to_log().cwiseMax(lower).cwiseMin(upper);
    } else {
      for (Eigen::Index i = 0; i < d + 2; ++i) x0[i] = rng.uniform(lower[i], upper[i]);
    }
    const numerics::BoxLbfgsResult r =
        numerics::minimize_box(negative_lml, x0, lower, upper, lbfgs);
    if (std::isfinite(r.value) && r.value < best_value) {
      best_value = r.value;
      best = r.x;
    }
  }
  model.hypers_ = GpHypers::from_log(best);
  model.condition();
  return model;
}

void GpModel::condition() {
  Eigen::MatrixXd Ky = covariance(X_, hypers_);
  Ky.diagonal().array() += hypers_.noise_variance + kJitter;
  llt_.compute(Ky);
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("GP covariance is not positive definite");
  }
  alpha_ = llt_.solve(y_std_);
  log_likelihood_ = log_marginal_likelihood(X_, y_std_, hypers_);
}

Posterior GpModel::posterior(const Eigen::VectorXd& x) const {
  const Eigen::Index n = X_.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = matern52(X_.row(i).transpose(), x, hypers_);
  const Eigen::VectorXd v = llt_.matrixL().solve(k);
  Posterior p;
  p.mean = y_mean_ + y_scale_ * k.dot(alpha_);
  p.variance = std::max(0.0, hypers_.signal_variance - v.squaredNorm()) * y_scale_ * y_scale_;
  return p;
}

void to_json(nlohmann::json& j, const GpHypers& h) {
  j = {{"signal_variance", h.signal_variance},
       {"length_scales", std::vector<double>(h.length_scales.data(),
                                             h.length_scales.data() + h.length_scales.size())},
       {"noise_variance", h.noise_variance}};
}

}  // namespace sctune::bayesopt
