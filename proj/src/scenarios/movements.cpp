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

#include "sctune/scenarios/movements.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sctune::scenarios {

robot::Twist VelocitySegment::twist() const {
  return {speed * std::cos(heading), speed * std::sin(heading), 0.0};
}

double Movement::total_time() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

robot::Twist Movement::twist_at(double t) const {
  if (segments.empty()) return robot::Twist::Zero();
  double end = 0.0;
  for (const auto& s : segments) {
    end += s.duration;
    if (t + 1e-9 < end) return s.twist();
  }
  return segments.back().twist();
}

bool placement_is_clear(const robot::JointVector& q,
                        const robot::RobotGeometry& geom,
                        const world::Esdf& esdf) {
  for (const auto& c : robot::sphere_centers(q, geom)) {
    const world::DistanceQuery d = esdf.signed_distance(c);
    if (d.out_of_map || d.distance < geom.sphere_radius) return false;
  }
  return true;
}

MovementSet generate_movements(std::uint64_t seed, const ScenarioOptions& opts,
                               const world::Esdf& esdf,
                               const robot::RobotGeometry& geom,
                               const robot::JointLimits& limits,
                               const std::string& environment_name) {
  if (opts.n_mov < 1 || opts.n_segments < 1) {
    throw std::invalid_argument("need at least one movement and one segment");
  }
  if (!(opts.duration > 0.0) || !(opts.v_max > 0.0)) {
    throw std::invalid_argument("movement duration and v_max must be positive");
  }
  MovementSet set;
  set.seed = seed;
  set.environment = environment_name;
  set.v_max = opts.v_max;
  ScenarioRng rng(seed);
  const double segment_time = opts.duration / opts.n_segments;

  for (int id = 0; id < opts.n_mov; ++id) {
    Movement mv;
    mv.id = id;
    bool placed = false;
    for (int attempt = 0; attempt < opts.max_placement_tries; ++attempt) {
      robot::JointVector q;
      for (int i = 0; i < 3; ++i) {
        q[i] = rng.uniform(limits.position_min[i], limits.position_max[i]);
      }
      if (placement_is_clear(q, geom, esdf)) {
        mv.initial_joints = q;
        placed = true;
        break;
      }
    }
    if (!placed) throw std::runtime_error("environment too cluttered");

    for (int s = 0; s < opts.n_segments; ++s) {
      VelocitySegment seg;
      seg.heading = 2.0 * std::numbers::pi * rng.uniform();
      seg.level = 1 + std::min(2, static_cast<int>(3.0 * rng.uniform()));
      seg.speed = seg.level * opts.v_max / 3.0;
      seg.duration = segment_time;
      mv.segments.push_back(seg);
    }
    set.movements.push_back(std::move(mv));
  }
  return set;
}

std::vector<DescribeRow> describe(const MovementSet& set,
                                  const robot::RobotGeometry& geom) {
  std::vector<DescribeRow> rows;
  rows.reserve(set.movements.size());
  for (const auto& mv : set.movements) {
    DescribeRow row;
    row.id = mv.id;
    row.start = robot::forward_kinematics(mv.initial_joints, geom);
    for (const auto& s : mv.segments) row.vectors.push_back(s.twist());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_description(const std::vector<DescribeRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "id   start_x  start_y  start_th  segments (vx, vy)\n";
  for (const auto& r : rows) {
    out << std::setw(3) << r.id << "  " << std::setw(7) << r.start.x << "  "
        << std::setw(7) << r.start.y << "  " << std::setw(8) << r.start.theta;
    for (const auto& v : r.vectors) {
      out << "  (" << v.x() << ", " << v.y() << ")";
    }
    out << '\n';
  }
  return out.str();
}

void to_json(nlohmann::json& j, const VelocitySegment& s) {
  j = {{"heading", s.heading},
       {"level", s.level},
       {"speed", s.speed},
       {"duration", s.duration}};
}

void from_json(const nlohmann::json& j, VelocitySegment& s) {
  s.heading = j.at("heading").get<double>();
  s.level = j.at("level").get<int>();
  s.speed = j.at("speed").get<double>();
  s.duration = j.at("duration").get<double>();
}

void to_json(nlohmann::json& j, const Movement& m) {
  j = {{"id", m.id},
       {"initial_joints",
        {m.initial_joints[0], m.initial_joints[1], m.initial_joints[2]}},
       {"segments", m.segments}};
}

void from_json(const nlohmann::json& j, Movement& m) {
  m.id = j.at("id").get<int>();
  const auto& q = j.at("initial_joints");
  m.initial_joints = {q.at(0).get<double>(), q.at(1).get<double>(),
                      q.at(2).get<double>()};
  m.segments = j.at("segments").get<std::vector<VelocitySegment>>();
}

void to_json(nlohmann::json& j, const MovementSet& s) {
  j = {{"seed", s.seed},
       {"environment", s.environment},
       {"v_max", s.v_max},
       {"movements", s.movements}};
}

void from_json(const nlohmann::json& j, MovementSet& s) {
  s.seed = j.at("seed").get<std::uint64_t>();
  s.environment = j.value("environment", std::string());
  s.v_max = j.at("v_max").get<double>();
  s.movements = j.at("movements").get<std::vector<Movement>>();
}

}  // namespace sctune::scenarios
