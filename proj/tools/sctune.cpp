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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sctune/bayesopt/space.hpp"
#include "sctune/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace sctune;

namespace {

struct Common {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::string clock;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "config name (config/<name>.json) or path")
      ->capture_default_str();
  cmd->add_option("-s,--seed", c.seed, "random seed");
  cmd->add_option("-o,--out", c.out, "run directory (default runs/<command>)");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--clock", c.clock, "solve-time clock")
      ->check(CLI::IsMember({"work", "system", "fixed"}));
}

harness::AppConfig load(const Common& c) {
  harness::AppConfig cfg = harness::load_config(c.config);
  if (c.threads) cfg.threads = *c.threads;
  if (c.clock == "work") cfg.clock.mode = sim::ClockSpec::Mode::kWork;
  if (c.clock == "system") cfg.clock.mode = sim::ClockSpec::Mode::kSystem;
  if (c.clock == "fixed") cfg.clock.mode = sim::ClockSpec::Mode::kFixed;
  return cfg;
}

harness::RunDir run_dir(const Common& c, const std::string& command) {
  return harness::RunDir(c.out.empty() ? fs::path("runs") / command : fs::path(c.out));
}

/// "tuning", "holdout" or a corpus file. --seed regenerates from that seed.
harness::CorpusConfig pick_corpus(const harness::AppConfig& cfg, const std::string& which,
                                  const std::optional<std::uint64_t>& seed,
                                  const std::optional<int>& n_mov) {
  harness::CorpusConfig c;
  if (which == "tuning") {
    c = cfg.tuning;
  } else if (which == "holdout") {
    c = cfg.holdout;
  } else {
    c.path = fs::absolute(which).string();
    if (!fs::exists(c.path)) throw std::runtime_error("corpus not found: " + which);
  }
  if (seed && *seed != c.seed) {
    c.seed = *seed;
    c.path.clear();
  }
  if (n_mov) c.n_mov = *n_mov;
  return c;
}

scenarios::MovementSet load_corpus(const harness::AppConfig& cfg, const harness::CorpusConfig& c,
                                   const harness::World& world) {
  scenarios::MovementSet set = harness::corpus(cfg, c, world);
  return harness::prefix(set, c.n_mov);
}

/// "baseline", "optimized" or a parameter file.
controller::MpcParams pick_params(const harness::AppConfig& cfg, const std::string& which) {
  if (which == "baseline" || which == "optimized") {
    const std::string& path = which == "baseline" ? cfg.baseline_params : cfg.optimized_params;
    if (path.empty()) {
      if (which == "baseline") return controller::MpcParams{};
      throw std::runtime_error("config names no optimized parameter file");
    }
    return harness::load_params(cfg.resolve(path));
  }
  return harness::load_params(fs::absolute(which));
}

int cmd_generate(const Common& c, const std::string& which, const std::optional<int>& n_mov,
                 const std::string& save) {
  const harness::AppConfig cfg = load(c);
  const harness::World world(cfg.environment);
  harness::CorpusConfig corpus = pick_corpus(cfg, which, c.seed, n_mov);
  const scenarios::MovementSet set =
      harness::generate_corpus(cfg, corpus.seed, corpus.n_mov, world);
  const harness::RunDir dir = run_dir(c, "scenarios");
  dir.write_config(cfg);
  dir.write_corpus(set);
  const std::string table =
      scenarios::format_description(scenarios::describe(set, cfg.geometry));
  dir.write_text("report.txt", table);
  if (!save.empty()) harness::save_corpus(save, set);
  std::cout << table << "corpus: " << set.movements.size() << " movements, seed " << set.seed
            << "\nrun directory: " << dir.path().string() << "\n";
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& params_name, const std::string& which,
                 const std::optional<int>& n_mov) {
  const harness::AppConfig cfg = load(c);
  const harness::World world(cfg.environment);
  const controller::MpcParams params = pick_params(cfg, params_name);
  const scenarios::MovementSet set = load_corpus(cfg, pick_corpus(cfg, which, c.seed, n_mov), world);
  const sim::SimContext ctx = harness::make_sim_context(cfg, world);
  const sim::EvalResult result = sim::evaluate_params(params, set, ctx);

  const harness::RunDir dir = run_dir(c, "evaluate");
  dir.write_config(cfg);
  dir.write_corpus(set);
  {
    std::ofstream log = dir.open_log("eval.jsonl");
    sim::write_eval_log(log, result, params_name);
  }
  nlohmann::json report = result;
  report.erase("wall_time");
  dir.write_json("report.json", report);
  char line[256];
  std::snprintf(line, sizeof line, "J=%.6f mean=%.6f n_succ=%d/%zu feasible=%s\n",
                result.objective, result.mean_objective, result.n_succ, result.movements.size(),
                result.feasible ? "true" : "false");
  dir.write_text("report.txt", line);
  std::cout << line << "run directory: " << dir.path().string() << "\n";
  return 0;
}

int cmd_optimize(const Common& c, const std::optional<int>& n_max, const std::optional<int>& n_init,
                 const std::optional<int>& n_mov, bool resume) {
  harness::AppConfig cfg = load(c);
  if (c.seed) cfg.bo.seed = *c.seed;
  if (n_max) cfg.bo.n_max = *n_max;
  if (n_init) cfg.bo.n_init = *n_init;
  if (n_mov) cfg.bo_n_mov = *n_mov;
  const harness::World world(cfg.environment);
  const controller::MpcParams baseline = pick_params(cfg, "baseline");
  const harness::RunDir dir = run_dir(c, "optimize");
  dir.write_config(cfg);
  dir.write_corpus(harness::prefix(harness::corpus(cfg, cfg.tuning, world), cfg.bo_n_mov));
  if (!resume) fs::remove(dir.file("history.json"));

  std::ofstream log = dir.open_log("optimize.jsonl");
  bayesopt::OptimizeHooks hooks;
  hooks.history_path = dir.file("history.json").string();
  hooks.on_entry = [&log](const bayesopt::HistoryEntry& e) {
    nlohmann::json line = e;
    log << line.dump() << '\n' << std::flush;
    std::fprintf(stderr, "[%d] %s J=%.5f best=%.5f\n", e.index, e.phase.c_str(), e.objective,
                 e.incumbent);
  };
  const harness::TuningRun run = harness::run_tuning(cfg, world, baseline, hooks);

  harness::save_params(dir.file("best_params.json"), run.best);
  const std::string text = harness::format_tuning(run, cfg.search_space());
  dir.write_text("report.txt", text);
  dir.write_json("report.json", {{"best_index", run.result.best_index},
                                 {"best_objective", run.result.best().objective},
                                 {"baseline_objective", run.baseline_objective},
                                 {"best_params", run.best},
                                 {"evaluations", run.result.history.size()}});
  std::cout << text << "run directory: " << dir.path().string() << "\n";
  return 0;
}

int cmd_compare(const Common& c, const std::string& a_name, const std::string& b_name,
                const std::string& which, const std::optional<int>& n_mov) {
  const harness::AppConfig cfg = load(c);
  const harness::World world(cfg.environment);
  const controller::MpcParams a = pick_params(cfg, a_name);
  const controller::MpcParams b = pick_params(cfg, b_name);
  const scenarios::MovementSet set = load_corpus(cfg, pick_corpus(cfg, which, c.seed, n_mov), world);
  const sim::SimContext ctx = harness::make_sim_context(cfg, world);
  sim::EvalResult ra;
  sim::EvalResult rb;
  const harness::ComparisonReport report = harness::compare(a, b, set, ctx, a_name, b_name, &ra, &rb);

  const harness::RunDir dir = run_dir(c, "compare");
  dir.write_config(cfg);
  dir.write_corpus(set);
  {
    std::ofstream log = dir.open_log("compare.jsonl");
    sim::write_eval_log(log, ra, a_name);
    sim::write_eval_log(log, rb, b_name);
  }
  const std::string text = harness::format_report(report);
  dir.write_text("report.txt", text);
  dir.write_json("report.json", report);
  std::cout << text << "run directory: " << dir.path().string() << "\n";
  return 0;
}

int cmd_screen(const Common& c, const std::optional<int>& trajectories,
               const std::optional<int>& n_mov) {
  harness::AppConfig cfg = load(c);
  if (c.seed) cfg.bo.seed = *c.seed;
  if (trajectories) cfg.screening.trajectories = *trajectories;
  if (n_mov) cfg.screening.n_mov = *n_mov;
  const harness::World world(cfg.environment);
  const bayesopt::MorrisResult result = harness::run_screening(cfg, world);
  const harness::RunDir dir = run_dir(c, "screen");
  dir.write_config(cfg);
  dir.write_corpus(harness::prefix(harness::corpus(cfg, cfg.tuning, world), cfg.screening.n_mov));
  {
    std::ofstream log = dir.open_log("screen.jsonl");
    for (const auto& e : result.effects) log << nlohmann::json(e).dump() << '\n';
  }
  const std::string text = harness::format_screening(result);
  dir.write_text("report.txt", text);
  dir.write_json("report.json", result);
  std::cout << text << "run directory: " << dir.path().string() << "\n";
  return 0;
}

int cmd_serve(const Common& c, const std::optional<std::string>& address,
              const std::optional<unsigned short>& port, bool lockstep,
              const std::string& custom_name) {
  harness::AppConfig cfg = load(c);
  const harness::World world(cfg.environment);
  const controller::MpcParams baseline = pick_params(cfg, "baseline");
  const controller::MpcParams optimized =
      cfg.optimized_params.empty() ? baseline : pick_params(cfg, "optimized");
  std::optional<controller::MpcParams> custom;
  if (!custom_name.empty()) custom = pick_params(cfg, custom_name);

  const harness::RunDir dir = run_dir(c, "serve");
  dir.write_config(cfg);
  std::ofstream log = dir.open_log("episodes.jsonl");
  harness::ServeOptions opts;
  opts.address = address.value_or(cfg.teleop.address);
  opts.port = port.value_or(cfg.teleop.port);
  opts.tick_rate = cfg.teleop.tick_rate;
  opts.lockstep = lockstep;
  opts.stop_on_signal = true;
  harness::TeleopServer server(
      opts,
      harness::make_session_factory(cfg, world, baseline, optimized, custom ? &*custom : nullptr),
      harness::make_episode_handler(harness::make_sim_context(cfg, world), &log));
  std::cout << "listening on ws://" << opts.address << ":" << server.port()
            << (lockstep ? " (lockstep)" : "") << std::endl;
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian-optimization tuner for an MPC shared controller"};
  app.require_subcommand(1);

  Common common;
  std::optional<int> n_mov;

  auto* scenarios_cmd = app.add_subcommand("scenarios", "movement corpora");
  scenarios_cmd->require_subcommand(1);
  auto* generate = scenarios_cmd->add_subcommand("generate", "generate a movement corpus");
  std::string gen_which = "tuning";
  std::string gen_save;
  add_common(generate, common);
  generate->add_option("--corpus", gen_which, "tuning or holdout")
      ->check(CLI::IsMember({"tuning", "holdout"}))
      ->capture_default_str();
  generate->add_option("-n,--n-mov", n_mov, "number of movements")->check(CLI::PositiveNumber);
  generate->add_option("--save", gen_save, "also write the corpus to this file");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate one parameter set");
  std::string eval_params = "baseline";
  std::string eval_corpus = "tuning";
  add_common(evaluate, common);
  evaluate->add_option("-p,--params", eval_params, "baseline, optimized or a parameter file")
      ->capture_default_str();
  evaluate->add_option("--corpus", eval_corpus, "tuning, holdout or a corpus file")
      ->capture_default_str();
  evaluate->add_option("-n,--n-mov", n_mov, "use the first n movements")
      ->check(CLI::PositiveNumber);

  auto* optimize = app.add_subcommand("optimize", "tune the parameters by Bayesian optimization");
  std::optional<int> n_max;
  std::optional<int> n_init;
  bool resume = false;
  add_common(optimize, common);
  optimize->add_option("--n-max", n_max, "BO iterations")->check(CLI::NonNegativeNumber);
  optimize->add_option("--n-init", n_init, "initial design size")->check(CLI::Range(2, 1000));
  optimize->add_option("-n,--n-mov", n_mov, "movements per evaluation")
      ->check(CLI::PositiveNumber);
  optimize->add_flag("--resume", resume, "continue from the history in the run directory");

  auto* compare = app.add_subcommand("compare", "compare two parameter sets on one corpus");
  std::string cmp_a = "baseline";
  std::string cmp_b = "optimized";
  std::string cmp_corpus = "holdout";
  add_common(compare, common);
  compare->add_option("-a,--a", cmp_a, "condition A")->capture_default_str();
  compare->add_option("-b,--b", cmp_b, "condition B")->capture_default_str();
  compare->add_option("--corpus", cmp_corpus, "tuning, holdout or a corpus file")
      ->capture_default_str();
  compare->add_option("-n,--n-mov", n_mov, "use the first n movements")
      ->check(CLI::PositiveNumber);

  auto* screen = app.add_subcommand("screen", "elementary-effects screening");
  std::optional<int> trajectories;
  add_common(screen, common);
  screen->add_option("-r,--trajectories", trajectories, "screening trajectories")
      ->check(CLI::PositiveNumber);
  screen->add_option("-n,--n-mov", n_mov, "movements per evaluation")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "teleoperation WebSocket service");
  std::optional<std::string> address;
  std::optional<unsigned short> port;
  bool lockstep = false;
  std::string custom;
  add_common(serve, common);
  serve->add_option("--address", address, "listen address");
  serve->add_option("--port", port, "listen port, 0 picks one");
  serve->add_flag("--lockstep", lockstep, "one control tick per cmd frame");
  serve->add_option("--custom", custom, "parameter file offered as condition \"custom\"");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(common, gen_which, n_mov, gen_save);
    if (evaluate->parsed()) return cmd_evaluate(common, eval_params, eval_corpus, n_mov);
    if (optimize->parsed()) return cmd_optimize(common, n_max, n_init, n_mov, resume);
    if (compare->parsed()) return cmd_compare(common, cmp_a, cmp_b, cmp_corpus, n_mov);
    if (screen->parsed()) return cmd_screen(common, trajectories, n_mov);
    if (serve->parsed()) return cmd_serve(common, address, port, lockstep, custom);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
