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

#include "okl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "okl/kernels.hpp"

namespace okl {

void FiniteLaw::sort_and_merge() {
  std::sort(atoms.begin(), atoms.end());
  std::size_t out = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (out > 0 && atoms[out - 1].first == atoms[i].first) {
      atoms[out - 1].second += atoms[i].second;
    } else {
      atoms[out++] = atoms[i];
    }
  }
  atoms.resize(out);
}

double FiniteLaw::total() const {
  double t = 0.0;
  for (const auto& [key, p] : atoms) t += p;
  return t;
}

void FiniteLaw::normalize() {
  const double t = total();
  if (!(t > 0.0)) throw std::domain_error("FiniteLaw: total mass must be positive");
  for (auto& [key, p] : atoms) p /= t;
}

void FiniteLaw::validate(double tol) const {
  for (const auto& [key, p] : atoms) {
    if (p < -tol) throw std::domain_error("FiniteLaw: negative probability");
  }
  if (std::abs(total() - 1.0) > tol) {
    throw std::domain_error("FiniteLaw: probabilities do not sum to 1");
  }
}

double FiniteLaw::prob(std::uint64_t key) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), key,
                             [](const auto& a, std::uint64_t k) { return a.first < k; });
  return (it != atoms.end() && it->first == key) ? it->second : 0.0;
}

void RealLaw::sort_and_merge(double value_eps) {
  std::sort(atoms.begin(), atoms.end());
  std::size_t out = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (out > 0 && atoms[i].first - atoms[out - 1].first <= value_eps) {
      atoms[out - 1].second += atoms[i].second;
    } else {
      atoms[out++] = atoms[i];
    }
  }
  atoms.resize(out);
}

double RealLaw::total() const {
  double t = 0.0;
  for (const auto& [value, p] : atoms) t += p;
  return t;
}

void RealLaw::normalize() {
  const double t = total();
  if (!(t > 0.0)) throw std::domain_error("RealLaw: total mass must be positive");
  for (auto& [value, p] : atoms) p /= t;
}

void RealLaw::validate(double tol) const {
  for (const auto& [value, p] : atoms) {
    if (p < -tol) throw std::domain_error("RealLaw: negative probability");
  }
  if (std::abs(total() - 1.0) > tol) {
    throw std::domain_error("RealLaw: probabilities do not sum to 1");
  }
}

double RealLaw::mean() const {
  double m = 0.0;
  for (const auto& [value, p] : atoms) m += value * p;
  return m;
}

double RealLaw::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& [value, p] : atoms) v += (value - m) * (value - m) * p;
  return v;
}

double total_variation(const FiniteLaw& p, const FiniteLaw& q) {
  // Union of keys; a missing outcome carries probability 0.
  double tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < p.atoms.size() || j < q.atoms.size()) {
    if (j >= q.atoms.size() ||
        (i < p.atoms.size() && p.atoms[i].first < q.atoms[j].first)) {
      tv += std::abs(p.atoms[i++].second);
    } else if (i >= p.atoms.size() || q.atoms[j].first < p.atoms[i].first) {
      tv += std::abs(q.atoms[j++].second);
    } else {
      tv += std::abs(p.atoms[i].second - q.atoms[j].second);
      ++i;
      ++j;
    }
  }
  return 0.5 * tv;
}

double total_variation(const RealLaw& p, const RealLaw& q, double value_eps) {
  double tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < p.atoms.size() || j < q.atoms.size()) {
    if (j >= q.atoms.size() ||
        (i < p.atoms.size() && p.atoms[i].first < q.atoms[j].first - value_eps)) {
      tv += std::abs(p.atoms[i++].second);
    } else if (i >= p.atoms.size() || q.atoms[j].first < p.atoms[i].first - value_eps) {
      tv += std::abs(q.atoms[j++].second);
    } else {
      tv += std::abs(p.atoms[i].second - q.atoms[j].second);
      ++i;
      ++j;
    }
  }
  return 0.5 * tv;
}

namespace {

struct Cdf {
  std::vector<double> values;  // ascending
  std::vector<double> cum;     // normalized cumulative mass at each value
};

Cdf build_cdf(const WeightedSample& s) {
  if (s.values.empty()) throw std::domain_error("empty sample");
  if (!s.weights.empty() && s.weights.size() != s.values.size()) {
    throw std::domain_error("weights and values must match in size");
  }
  std::vector<std::size_t> order(s.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
  Cdf cdf;
  cdf.values.reserve(order.size());
  cdf.cum.reserve(order.size());
  double acc = 0.0;
  for (std::size_t idx : order) {
    const double w = s.weights.empty() ? 1.0 : s.weights[idx];
    if (w < 0.0) throw std::domain_error("negative weight");
    acc += w;
    if (!cdf.values.empty() && cdf.values.back() == s.values[idx]) {
      cdf.cum.back() = acc;
    } else {
      cdf.values.push_back(s.values[idx]);
      cdf.cum.push_back(acc);
    }
  }
  if (!(acc > 0.0)) throw std::domain_error("total weight must be positive");
  for (auto& c : cdf.cum) c /= acc;
  return cdf;
}

// Walk the union of jump points; both CDFs are right-continuous steps.
template <typename Visit>
void walk_cdfs(const Cdf& a, const Cdf& b, Visit&& visit) {
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0;
  double prev_x = 0.0;
  bool first = true;
  while (i < a.values.size() || j < b.values.size()) {
    double x;
    if (j >= b.values.size() || (i < a.values.size() && a.values[i] <= b.values[j])) {
      x = a.values[i];
    } else {
      x = b.values[j];
    }
    if (!first) visit(prev_x, x, fa, fb);  // plateau [prev_x, x)
    while (i < a.values.size() && a.values[i] == x) fa = a.cum[i++];
    while (j < b.values.size() && b.values[j] == x) fb = b.cum[j++];
    prev_x = x;
    first = false;
  }
  visit(prev_x, prev_x, fa, fb);
}

double ks_from_cdfs(const Cdf& a, const Cdf& b) {
  double sup = 0.0;
  walk_cdfs(a, b, [&](double, double, double fa, double fb) {
    sup = std::max(sup, std::abs(fa - fb));
  });
  return sup;
}

double w1_from_cdfs(const Cdf& a, const Cdf& b) {
  double acc = 0.0;
  walk_cdfs(a, b, [&](double x0, double x1, double fa, double fb) {
    acc += std::abs(fa - fb) * (x1 - x0);
  });
  return acc;
}

}  // namespace

WeightedSample to_sample(const RealLaw& law) {
  WeightedSample s;
  s.values.reserve(law.atoms.size());
  s.weights.reserve(law.atoms.size());
  for (const auto& [value, p] : law.atoms) {
    s.values.push_back(value);
    s.weights.push_back(p);
  }
  return s;
}

double ks_distance(const WeightedSample& a, const WeightedSample& b) {
  return ks_from_cdfs(build_cdf(a), build_cdf(b));
}

double ks_distance(const RealLaw& a, const WeightedSample& b) {
  return ks_distance(to_sample(a), b);
}

double ks_distance(const RealLaw& a, const RealLaw& b) {
  return ks_distance(to_sample(a), to_sample(b));
}

double wasserstein1(const WeightedSample& a, const WeightedSample& b) {
  return w1_from_cdfs(build_cdf(a), build_cdf(b));
}

double wasserstein1(const RealLaw& a, const RealLaw& b) {
  return wasserstein1(to_sample(a), to_sample(b));
}

double ess(std::span<const double> weights) {
  if (weights.empty()) throw std::domain_error("ess: empty weights");
  const auto m = kernels::weight_moments(weights);
  if (!(m.sum > 0.0)) return 0.0;
  return m.sum * m.sum / m.sum_sq;
}

TrendVerdict trend_report(std::span<const double> series, double slack) {
  if (series.size() < 2) throw std::domain_error("trend_report: need at least 2 points");
  TrendVerdict verdict;
  verdict.decreasing = series.back() < series.front();
  verdict.max_step_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double ratio = series[i] > 0.0
                             ? series[i + 1] / series[i]
                             : (series[i + 1] <= series[i] ? 1.0 : 1e300);
    verdict.max_step_ratio = std::max(verdict.max_step_ratio, ratio);
    if (series[i + 1] > series[i] * (1.0 + slack)) verdict.decreasing = false;
  }
  return verdict;
}

}  // namespace okl
