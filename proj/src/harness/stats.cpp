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

#include "sctune/harness/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace sctune::harness {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("variance needs two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("t distribution needs df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const boost::math::students_t dist(df);
  return boost::math::cdf(dist, t);
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                         Tail tail) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("t-test needs at least two values per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  if (!std::isfinite(va) || !std::isfinite(vb)) {
    throw std::invalid_argument("t-test needs finite variances");
  }
  WelchResult r;
  const double se2 = va + vb;
  if (se2 <= 0.0) {
    if (ma == mb) {
      r.p = 0.5;
    } else {
      const bool less = ma < mb;
      r.t = less ? -INFINITY : INFINITY;
      r.p = (tail == Tail::kLess) == less ? 0.0 : 1.0;
    }
    r.df = na + nb - 2.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const double lower = student_t_cdf(r.t, r.df);
  r.p = tail == Tail::kLess ? lower : student_t_cdf(-r.t, r.df);
  return r;
}

double t_test_one_tailed(const std::vector<double>& a, const std::vector<double>& b,
                         Tail tail) {
  return welch_t_test(a, b, tail).p;
}

double confidence_half_width(const std::vector<double>& x, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  if (x.size() < 2) return 0.0;
  const double n = static_cast<double>(x.size());
  const boost::math::students_t dist(n - 1.0);
  const double q = boost::math::quantile(dist, 0.5 + 0.5 * level);
  return q * std::sqrt(sample_variance(x) / n);
}

}  // namespace sctune::harness
