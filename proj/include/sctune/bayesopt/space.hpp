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
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "sctune/controller/mpc.hpp"

namespace sctune::bayesopt {

struct Dimension {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  bool integer = false;
};

/// Box of named dimensions with a unit-cube view. Points in raw units are
/// "snapped" by rounding integer dimensions and then applying the repair
/// hook, so every point handed to an evaluator is admissible.
class SearchSpace {
 public:
  using Repair = std::function<void(Eigen::VectorXd&)>;

  SearchSpace() = default;
  explicit SearchSpace(std::vector<Dimension> dims, Repair repair = {});

  int size() const { return static_cast<int>(dims_.size()); }
  const std::vector<Dimension>& dims() const { return dims_; }
  int index_of(const std::string& name) const;

  Eigen::VectorXd to_unit(const Eigen::VectorXd& raw) const;
  /// Raw point for a unit-cube point (clamped to [0, 1]); not snapped.
  Eigen::VectorXd from_unit(const Eigen::VectorXd& unit) const;
  /// Round integers, clamp to bounds, repair.
  Eigen::VectorXd snap(const Eigen::VectorXd& raw) const;
  /// Unit point of snap(from_unit(unit)).
  Eigen::VectorXd snap_unit(const Eigen::VectorXd& unit) const;
  bool contains(const Eigen::VectorXd& raw) const;

 private:
  std::vector<Dimension> dims_;
  Repair repair_;
};

/// Tuning set: Np, Nc, Qx, Qy, Qtheta, c1, c2 in that order. Snapping
/// enforces Np >= Nc via Nc <- min(Nc, Np).
SearchSpace mpc_param_space();
SearchSpace mpc_param_space(std::vector<Dimension> dims);

Eigen::VectorXd params_to_vector(const controller::MpcParams& p);
controller::MpcParams vector_to_params(const Eigen::VectorXd& raw);

void to_json(nlohmann::json& j, const Dimension& d);
void from_json(const nlohmann::json& j, Dimension& d);

}  // namespace sctune::bayesopt
