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

#include "sctune/sim/simulator.hpp"
#include "sctune/world/environment.hpp"
#include "sctune/world/esdf.hpp"

namespace sctune::testing {

struct Room {
  world::OccupancyGrid grid = world::builtin_environment(world::EnvironmentSpec::operating_room());
  world::Esdf esdf{grid};
};

inline const Room& room() {
  static const Room r;
  return r;
}

/// Single-threaded context on the operating room with a deterministic clock.
inline sim::SimContext room_context() {
  sim::SimContext ctx;
  ctx.esdf = &room().esdf;
  ctx.threads = 1;
  return ctx;
}

}  // namespace sctune::testing
