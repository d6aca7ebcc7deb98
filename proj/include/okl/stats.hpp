// Copyright 2026 The openkpz Authors
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

#ifndef OKL_STATS_HPP
#define OKL_STATS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace okl {

/// Exactly normalized probability table over discrete outcomes, keyed by a
/// caller-chosen uint64 encoding (occupancy bits, sign-sequence bits, ...).
struct FiniteLaw {
  std::vector<std::pair<std::uint64_t, double>> atoms;

  void sort_and_merge();
  double total() const;
  void normalize();
  /// Nonnegative probabilities summing to 1 within tol.
  void validate(double tol = 1e-12) const;
  double prob(std::uint64_t key) const;
};

/// Probability table over real-valued outcomes.
struct RealLaw {
  std::vector<std::pair<double, double>> atoms;  // (value, probability)

  void sort_and_merge(double value_eps = 0.0);
  double total() const;
  void normalize();
  void validate(double tol = 1e-12) const;
  double mean() const;
  double variance() const;
};

/// A real-valued sample with optional importance weights (self-normalized
/// when used; empty weights mean uniform).
struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;
};

double total_variation(const FiniteLaw& p, const FiniteLaw& q);
double total_variation(const RealLaw& p, const RealLaw& q, double value_eps = 1e-12);

double ks_distance(const WeightedSample& a, const WeightedSample& b);
double ks_distance(const RealLaw& a, const WeightedSample& b);
double ks_distance(const RealLaw& a, const RealLaw& b);

double wasserstein1(const WeightedSample& a, const WeightedSample& b);
double wasserstein1(const RealLaw& a, const RealLaw& b);

/// Effective sample size (sum w)^2 / sum w^2.
double ess(std::span<const double> weights);

struct TrendVerdict {
  bool decreasing = false;   // every step within slack and net decrease
  double max_step_ratio = 0; // max s[i+1]/s[i]
};

/// Flags whether a series is decreasing up to a multiplicative slack:
/// s[i+1] <= s[i] (1 + slack) for every step and s.back() < s.front().
TrendVerdict trend_report(std::span<const double> series, double slack);

WeightedSample to_sample(const RealLaw& law);

}  // namespace okl

#endif  // OKL_STATS_HPP
