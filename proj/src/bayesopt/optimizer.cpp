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

#include "sctune/bayesopt/optimizer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sctune::bayesopt {
namespace {

// Stream indices for derived RNGs.
constexpr std::uint64_t kLhsStream = 0;
constexpr std::uint64_t kProposalStream = 1'000'000;
constexpr std::uint64_t kFitStream = 2'000'000;

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_atomically(const std::string& path, const nlohmann::json& j) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, target);
}

// Updates the incumbent fields of the last entry. A feasible point beats an
// infeasible one at equal objective.
void update_incumbent(OptResult& r) {
  HistoryEntry& e = r.history.back();
  if (r.best_index < 0) {
    r.best_index = e.index;
  } else {
    const HistoryEntry& b = r.history[static_cast<std::size_t>(r.best_index)];
    if (e.objective < b.objective ||
        (e.objective == b.objective && e.feasible && !b.feasible)) {
      r.best_index = e.index;
    }
  }
  e.incumbent_index = r.best_index;
  e.incumbent = r.history[static_cast<std::size_t>(r.best_index)].objective;
}

}  // namespace

void BoConfig::validate() const {
  if (n_init < 2) throw std::invalid_argument("n_init must be at least 2");
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  if (proposal.candidates < 1) throw std::invalid_argument("need at least one candidate");
}

const HistoryEntry& OptResult::best() const {
  if (best_index < 0) throw std::logic_error("empty optimization history");
  return history[static_cast<std::size_t>(best_index)];
}

std::vector<Eigen::VectorXd> latin_hypercube(int n, int d, numerics::Rng& rng) {
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n), Eigen::VectorXd(d));
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) strata[static_cast<std::size_t>(i)] = i;
    rng.shuffle(strata);
    for (int i = 0; i < n; ++i) {
      pts[static_cast<std::size_t>(i)][j] =
          (strata[static_cast<std::size_t>(i)] + rng.uniform()) / n;
    }
  }
  return pts;
}

OptResult optimize(const BoConfig& cfg, const SearchSpace& space,
                   const Evaluator& evaluate,
                   const std::vector<Eigen::VectorXd>& seed_points,
                   const OptimizeHooks& hooks) {
  cfg.validate();
  OptResult previous;
  if (!hooks.history_path.empty() && std::filesystem::exists(hooks.history_path)) {
    std::ifstream in(hooks.history_path);
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("seed").get<std::uint64_t>() != cfg.seed ||
        j.at("space").get<std::vector<Dimension>>().size() != space.dims().size()) {
      throw std::runtime_error("history file belongs to a different run");
    }
    previous = history_from_json(j);
  }

  OptResult result;
  const auto persist = [&] {
    if (!hooks.history_path.empty()) {
      write_atomically(hooks.history_path, history_to_json(result, cfg, space));
    }
  };

  const auto run = [&](HistoryEntry entry) {
    entry.index = static_cast<int>(result.history.size());
    entry.raw = space.snap(entry.raw);
    const std::size_t slot = static_cast<std::size_t>(entry.index);
    if (slot < previous.history.size()) {
      const HistoryEntry& old = previous.history[slot];
      if (old.raw.size() != entry.raw.size() ||
          (old.raw - entry.raw).cwiseAbs().maxCoeff() > 1e-9 || old.phase != entry.phase) {
        throw std::runtime_error("history file does not replay: entry " +
                                 std::to_string(entry.index) + " differs");
      }
      entry.objective = old.objective;
      entry.feasible = old.feasible;
      entry.details = old.details;
      entry.raw = old.raw;
    } else {
      Observation obs;
      try {
        obs = evaluate(entry.raw);
      } catch (...) {
        persist();
        throw;
      }
      if (!std::isfinite(obs.objective)) {
        persist();
        throw std::runtime_error("evaluator returned a non-finite objective");
      }
      entry.objective = obs.objective;
      entry.feasible = obs.feasible;
      entry.details = std::move(obs.details);
    }
    result.history.push_back(std::move(entry));
    update_incumbent(result);
    persist();
    if (hooks.on_entry) hooks.on_entry(result.history.back());
  };

  for (const auto& p : seed_points) {
    HistoryEntry e;
    e.phase = "seed";
    e.raw = p;
    run(std::move(e));
  }

  numerics::Rng lhs_rng = numerics::Rng::derived(cfg.seed, kLhsStream);
  for (const auto& u : latin_hypercube(cfg.n_init, space.size(), lhs_rng)) {
    HistoryEntry e;
    e.phase = "init";
    e.raw = space.from_unit(u);
    run(std::move(e));
  }

  for (int it = 0; it < cfg.n_max; ++it) {
    const Eigen::Index n = static_cast<Eigen::Index>(result.history.size());
    Eigen::MatrixXd X(n, space.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      X.row(i) = space.to_unit(result.history[static_cast<std::size_t>(i)].raw).transpose();
      y[i] = result.history[static_cast<std::size_t>(i)].objective;
    }
    GpFitOptions fit = cfg.gp;
    fit.seed = numerics::Rng::derived(cfg.seed, kFitStream + static_cast<std::uint64_t>(it))
                   .below(std::uint64_t{1} << 62);
    const GpModel model = GpModel::fit(std::move(X), y, fit);
    numerics::Rng rng =
        numerics::Rng::derived(cfg.seed, kProposalStream + static_cast<std::uint64_t>(it));
    const double y_best = result.best().objective;
    const Proposal proposal = propose_next(model, space, y_best, rng, cfg.proposal);

    HistoryEntry e;
    e.phase = "bo";
    e.raw = proposal.raw;
    e.ei = proposal.ei;
    e.hypers = model.hypers();
    run(std::move(e));
  }
  return result;
}

void to_json(nlohmann::json& j, const HistoryEntry& e) {
  j = {{"index", e.index},
       {"phase", e.phase},
       {"x", to_std(e.raw)},
       {"objective", e.objective},
       {"feasible", e.feasible},
       {"incumbent", e.incumbent},
       {"incumbent_index", e.incumbent_index}};
  if (e.phase == "bo") {
    j["ei"] = e.ei;
    j["hypers"] = e.hypers;
  }
  if (!e.details.is_null()) j["details"] = e.details;
}

void from_json(const nlohmann::json& j, HistoryEntry& e) {
  e.index = j.at("index").get<int>();
  e.phase = j.at("phase").get<std::string>();
  e.raw = from_std(j.at("x").get<std::vector<double>>());
  e.objective = j.at("objective").get<double>();
  e.feasible = j.at("feasible").get<bool>();
  e.incumbent = j.value("incumbent", e.objective);
  e.incumbent_index = j.value("incumbent_index", e.index);
  e.ei = j.value("ei", 0.0);
  e.hypers = j.value("hypers", nlohmann::json());
  e.details = j.value("details", nlohmann::json());
}

void to_json(nlohmann::json& j, const BoConfig& c) {
  j = {{"n_init", c.n_init},
       {"n_max", c.n_max},
       {"seed", c.seed},
       {"candidates", c.proposal.candidates},
       {"refine", c.proposal.refine},
       {"gp_starts", c.gp.starts}};
}

void from_json(const nlohmann::json& j, BoConfig& c) {
  c = BoConfig{};
  c.n_init = j.value("n_init", c.n_init);
  c.n_max = j.value("n_max", c.n_max);
  c.seed = j.value("seed", c.seed);
  c.proposal.candidates = j.value("candidates", c.proposal.candidates);
  c.proposal.refine = j.value("refine", c.proposal.refine);
  c.gp.starts = j.value("gp_starts", c.gp.starts);
  c.validate();
}

nlohmann::json history_to_json(const OptResult& result, const BoConfig& cfg,
                               const SearchSpace& space) {
  nlohmann::json j = {{"version", 1},
                      {"seed", cfg.seed},
                      {"config", cfg},
                      {"space", space.dims()},
                      {"history", result.history},
                      {"best_index", result.best_index}};
  if (result.best_index >= 0) {
    j["best"] = {{"x", to_std(result.best().raw)}, {"objective", result.best().objective}};
  }
  return j;
}

OptResult history_from_json(const nlohmann::json& j) {
  OptResult r;
  r.history = j.at("history").get<std::vector<HistoryEntry>>();
  r.best_index = j.value("best_index", -1);
  return r;
}

}  // namespace sctune::bayesopt
