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

#include "sctune/harness/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "sctune/harness/stats.hpp"

namespace sctune::harness {
namespace {

SampleSummary summarize(const std::vector<double>& x) {
  SampleSummary s;
  s.n = static_cast<int>(x.size());
  s.mean = mean(x);
  s.half_width = confidence_half_width(x);
  return s;
}

ConditionSummary condition(const sim::EvalResult& e, const std::string& label) {
  ConditionSummary c;
  c.label = label;
  c.params = e.params;
  c.objective = e.objective;
  c.mean_objective = e.mean_objective;
  c.n_succ = e.n_succ;
  double infeasible = 0.0;
  c.min_sd = e.movements.front().min_sd;
  for (const auto& m : e.movements) {
    infeasible += m.infeasible_fraction;
    c.min_sd = std::min(c.min_sd, m.min_sd);
  }
  c.infeasible_rate = infeasible / static_cast<double>(e.movements.size());
  return c;
}

// Welch p for "b better than a"; identical samples give 0.5 by definition.
double improvement_p(const std::vector<double>& a, const std::vector<double>& b,
                     bool higher_is_better) {
  if (a.size() < 2 || b.size() < 2) return 0.5;
  if (a == b) return 0.5;
  return t_test_one_tailed(b, a, higher_is_better ? Tail::kGreater : Tail::kLess);
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

double ComparisonReport::relative_improvement() const {
  return a.objective != 0.0 ? (a.objective - b.objective) / a.objective : 0.0;
}

ComparisonReport build_report(const sim::EvalResult& a, const sim::EvalResult& b,
                              const std::string& label_a, const std::string& label_b) {
  if (a.movements.empty() || a.movements.size() != b.movements.size()) {
    throw std::invalid_argument("comparison needs the same non-empty corpus for both conditions");
  }
  ComparisonReport r;
  r.n_mov = static_cast<int>(a.movements.size());
  r.a = condition(a, label_a);
  r.b = condition(b, label_b);

  const auto column = [](const sim::EvalResult& e, int h) {
    std::vector<double> out;
    for (const auto& m : e.movements) {
      out.push_back(h < 6 ? m.metrics.as_array()[static_cast<std::size_t>(h)] : m.objective);
    }
    return out;
  };
  for (int h = 0; h <= 6; ++h) {
    MetricComparison row;
    row.name = h < 6 ? std::string(metrics::kMetricNames[static_cast<std::size_t>(h)]) : "objective";
    row.higher_is_better = h == 0;
    const auto va = column(a, h);
    const auto vb = column(b, h);
    row.a = summarize(va);
    row.b = summarize(vb);
    row.p = improvement_p(va, vb, row.higher_is_better);
    r.rows.push_back(std::move(row));
  }
  return r;
}

ComparisonReport compare(const controller::MpcParams& a, const controller::MpcParams& b,
                         const scenarios::MovementSet& corpus, const sim::SimContext& ctx,
                         const std::string& label_a, const std::string& label_b,
                         sim::EvalResult* eval_a, sim::EvalResult* eval_b) {
  if (corpus.movements.empty()) throw std::invalid_argument("comparison corpus is empty");
  sim::EvalResult ra = sim::evaluate_params(a, corpus, ctx);
  sim::EvalResult rb = a == b ? ra : sim::evaluate_params(b, corpus, ctx);
  rb.params = b;
  ComparisonReport report = build_report(ra, rb, label_a, label_b);
  if (eval_a != nullptr) *eval_a = std::move(ra);
  if (eval_b != nullptr) *eval_b = std::move(rb);
  return report;
}

std::string format_report(const ComparisonReport& r) {
  static const char* const kUnits[] = {"m", "%", "m", "rad/m", "1/sample", "ms", "-"};
  std::ostringstream out;
  out << "movements: " << r.n_mov << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-9s %-24s %-24s %s\n", "metric", "unit",
                r.a.label.c_str(), r.b.label.c_str(), "p (B better)");
  out << line;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const std::string ca = general(row.a.mean) + " [" + general(row.a.half_width) + "]";
    const std::string cb = general(row.b.mean) + " [" + general(row.b.half_width) + "]";
    std::snprintf(line, sizeof line, "%-10s %-9s %-24s %-24s %s\n", row.name.c_str(), kUnits[i],
                  ca.c_str(), cb.c_str(), fixed(row.p, 4).c_str());
    out << line;
  }
  out << "\n";
  std::snprintf(line, sizeof line, "%-10s %-24s %-24s\n", "", r.a.label.c_str(), r.b.label.c_str());
  out << line;
  const auto pair_line = [&](const char* name, const std::string& va, const std::string& vb) {
    std::snprintf(line, sizeof line, "%-10s %-24s %-24s\n", name, va.c_str(), vb.c_str());
    out << line;
  };
  pair_line("J", fixed(r.a.objective, 5), fixed(r.b.objective, 5));
  pair_line("n_succ", std::to_string(r.a.n_succ), std::to_string(r.b.n_succ));
  pair_line("infeasible", fixed(100.0 * r.a.infeasible_rate, 3) + " %",
            fixed(100.0 * r.b.infeasible_rate, 3) + " %");
  pair_line("min_sd", fixed(r.a.min_sd, 4), fixed(r.b.min_sd, 4));
  out << "relative improvement of J: " << fixed(100.0 * r.relative_improvement(), 2) << " %\n";
  return out.str();
}

void to_json(nlohmann::json& j, const SampleSummary& s) {
  j = {{"mean", s.mean}, {"half_width", s.half_width}, {"n", s.n}};
}

void to_json(nlohmann::json& j, const MetricComparison& m) {
  j = {{"name", m.name}, {"higher_is_better", m.higher_is_better},
       {"a", m.a}, {"b", m.b}, {"p", m.p}};
}

void to_json(nlohmann::json& j, const ConditionSummary& c) {
  j = {{"label", c.label},
       {"params", c.params},
       {"objective", c.objective},
       {"mean_objective", c.mean_objective},
       {"n_succ", c.n_succ},
       {"infeasible_rate", c.infeasible_rate},
       {"min_sd", c.min_sd}};
}

void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = {{"n_mov", r.n_mov},
       {"a", r.a},
       {"b", r.b},
       {"rows", r.rows},
       {"relative_improvement", r.relative_improvement()}};
}

}  // namespace sctune::harness
