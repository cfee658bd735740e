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

#include "sctune/bayesopt/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sctune::bayesopt {

SearchSpace::SearchSpace(std::vector<Dimension> dims, Repair repair)
    : dims_(std::move(dims)), repair_(std::move(repair)) {
  if (dims_.empty()) throw std::invalid_argument("search space needs a dimension");
  for (const auto& d : dims_) {
    if (!(d.lower < d.upper)) {
      throw std::invalid_argument("dimension '" + d.name + "' needs lower < upper");
    }
  }
}

int SearchSpace::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (dims_[static_cast<std::size_t>(i)].name == name) return i;
  }
  throw std::out_of_range("no dimension named '" + name + "'");
}

Eigen::VectorXd SearchSpace::to_unit(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd u(size());
  for (int i = 0; i < size(); ++i) {
    const Dimension& d = dims_[static_cast<std::size_t>(i)];
    u[i] = (raw[i] - d.lower) / (d.upper - d.lower);
  }
  return u;
}

Eigen::VectorXd SearchSpace::from_unit(const Eigen::VectorXd& unit) const {
  Eigen::VectorXd raw(size());
  for (int i = 0; i < size(); ++i) {
    const Dimension& d = dims_[static_cast<std::size_t>(i)];
    raw[i] = d.lower + std::clamp(unit[i], 0.0, 1.0) * (d.upper - d.lower);
  }
  return raw;
}

Eigen::VectorXd SearchSpace::snap(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd out = raw;
  for (int i = 0; i < size(); ++i) {
    const Dimension& d = dims_[static_cast<std::size_t>(i)];
    double v = std::clamp(out[i], d.lower, d.upper);
    if (d.integer) v = std::clamp(std::round(v), std::ceil(d.lower), std::floor(d.upper));
    out[i] = v;
  }
  if (repair_) repair_(out);
  return out;
}

Eigen::VectorXd SearchSpace::snap_unit(const Eigen::VectorXd& unit) const {
  return to_unit(snap(from_unit(unit)));
}

bool SearchSpace::contains(const Eigen::VectorXd& raw) const {
  if (raw.size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    const Dimension& d = dims_[static_cast<std::size_t>(i)];
    if (!(raw[i] >= d.lower && raw[i] <= d.upper)) return false;
    if (d.integer && raw[i] != std::round(raw[i])) return false;
  }
  return true;
}

SearchSpace mpc_param_space() {
  return mpc_param_space({{"Np", 5, 40, true},
                          {"Nc", 1, 40, true},
                          {"Qx", 0.1, 10, false},
                          {"Qy", 0.1, 10, false},
                          {"Qtheta", 0.1, 10, false},
                          {"c1", 1, 20, false},
                          {"c2", 5, 40, false}});
}

SearchSpace mpc_param_space(std::vector<Dimension> dims) {
  static const char* const kNames[] = {"Np", "Nc", "Qx", "Qy", "Qtheta", "c1", "c2"};
  if (dims.size() != 7) throw std::invalid_argument("MPC space has 7 dimensions");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].name != kNames[i]) {
      throw std::invalid_argument(std::string("MPC dimension ") + std::to_string(i) +
                                  " must be " + kNames[i]);
    }
  }
  dims[0].integer = true;
  dims[1].integer = true;
  return SearchSpace(std::move(dims), [](Eigen::VectorXd& raw) {
    raw[1] = std::min(raw[1], raw[0]);
  });
}

Eigen::VectorXd params_to_vector(const controller::MpcParams& p) {
  Eigen::VectorXd v(7);
  v << p.prediction_horizon, p.control_horizon, p.tracking_weights.x(),
      p.tracking_weights.y(), p.tracking_weights.z(), p.penalty_scale,
      p.penalty_steepness;
  return v;
}

controller::MpcParams vector_to_params(const Eigen::VectorXd& raw) {
  if (raw.size() != 7) throw std::invalid_argument("MPC parameter vector has 7 entries");
  controller::MpcParams p;
  p.prediction_horizon = static_cast<int>(std::lround(raw[0]));
  p.control_horizon = static_cast<int>(std::lround(raw[1]));
  p.tracking_weights = {raw[2], raw[3], raw[4]};
  p.penalty_scale = raw[5];
  p.penalty_steepness = raw[6];
  return p;
}

void to_json(nlohmann::json& j, const Dimension& d) {
  j = {{"name", d.name}, {"lower", d.lower}, {"upper", d.upper}, {"integer", d.integer}};
}

void from_json(const nlohmann::json& j, Dimension& d) {
  d.name = j.at("name").get<std::string>();
  d.lower = j.at("lower").get<double>();
  d.upper = j.at("upper").get<double>();
  d.integer = j.value("integer", false);
}

}  // namespace sctune::bayesopt
