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

#include <vector>

namespace sctune::harness {

/// Alternative hypothesis of a one-tailed test on mean(a) - mean(b).
enum class Tail { kLess, kGreater };

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 0.5;
};

double mean(const std::vector<double>& x);
/// Unbiased (n - 1) variance.
double sample_variance(const std::vector<double>& x);

/// CDF of Student's t distribution with (possibly fractional) df.
double student_t_cdf(double t, double df);

/// Welch's unequal-variance t-test, one-tailed in the given direction.
/// Needs at least two values per sample. When both variances vanish the
/// p-value is 0.5 for equal means and 0 or 1 otherwise.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                         Tail tail);
double t_test_one_tailed(const std::vector<double>& a, const std::vector<double>& b,
                         Tail tail);

/// Half-width of the two-sided t confidence interval of the mean.
double confidence_half_width(const std::vector<double>& x, double level = 0.95);

}  // namespace sctune::harness
