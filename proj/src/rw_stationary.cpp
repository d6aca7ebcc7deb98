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

#include "okl/rw_stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "okl/common.hpp"

namespace okl {

namespace {

void require_fan_inputs(const AbcdParams& abcd) {
  if (!(abcd.a_param > 0.0 && abcd.c_param > 0.0)) {
    throw std::domain_error("rw_stationary: A and C must be positive");
  }
}

// log sum_j exp(j log A) f[j] with f >= 0 given in linear scale.
double log_dot_a_powers(const std::vector<double>& f, double log_a, double log_scale) {
  double peak = kNegInf;
  for (std::size_t j = 1; j < f.size(); ++j) {
    if (f[j] > 0.0) peak = std::max(peak, j * log_a + std::log(f[j]));
  }
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t j = 1; j < f.size(); ++j) {
    if (f[j] > 0.0) acc += std::exp(j * log_a + std::log(f[j]) - peak);
  }
  return log_scale + peak + std::log(acc);
}

// One DP sweep: new[j] = [j]_q (sum over allowed moves into j), support
// cut at j = 0. Rescales to keep the row near unit magnitude.
void rescale_row(std::vector<double>& f, double& log_scale) {
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, v);
  if (peak > 0.0 && (peak > 1e200 || peak < 1e-200)) {
    for (double& v : f) v /= peak;
    log_scale += std::log(peak);
  }
}

}  // namespace

void LatticePath2D::validate() const {
  if (offset_r < 1) throw std::domain_error("LatticePath2D: offset r must be positive");
  if (n_path.size() != m_path.size() || n_path.empty()) {
    throw std::domain_error("LatticePath2D: component length mismatch");
  }
  if (n_path.front() != 0 || m_path.front() != 0) {
    throw std::domain_error("LatticePath2D: walks start at (0, 0)");
  }
  for (std::size_t i = 1; i < n_path.size(); ++i) {
    const int dn = n_path[i] - n_path[i - 1];
    const int dm = m_path[i] - m_path[i - 1];
    if (std::abs(dn) + std::abs(dm) != 1) {
      throw std::domain_error("LatticePath2D: exactly one coordinate moves by 1 per step");
    }
  }
}

RwWeight rw_weight(const LatticePath2D& path, const AbcdParams& abcd, double q) {
  path.validate();
  require_fan_inputs(abcd);
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("rw_weight: q must lie in [0,1)");
  const int n = path.n_steps();
  const double log_a = std::log(abcd.a_param);
  const double log_c = std::log(abcd.c_param);
  const double log_q = q > 0.0 ? std::log(q) : kNegInf;

  RwWeight out;
  out.in_support = true;
  double log_w = path.offset_r * log_c + (path.n_path.back() + path.offset_r) * log_a;
  // 4^N from the definition and (1/4)^N from the SSRW law cancel; both kept.
  log_w += n * std::log(4.0) + n * std::log(0.25);
  for (int i = 0; i <= n; ++i) {
    const int level = path.n_path[i] + path.offset_r;
    if (level < 1) {
      out.in_support = false;
      out.log_weight = kNegInf;
      return out;
    }
    log_w += log_q_bracket(static_cast<double>(level), log_q);
  }
  out.log_weight = log_w;
  return out;
}

int rw_auto_r_max(const AbcdParams& abcd, double q, int n_steps) {
  require_fan_inputs(abcd);
  const double ac = abcd.a_param * abcd.c_param;
  if (!(ac < 1.0)) {
    throw DivergenceError("rw_stationary: partition function diverges for A C >= 1");
  }
  const double log_ac = std::log(ac);
  const double log_a = std::log(abcd.a_param);
  // per-offset bound: 4^N (AC)^r max(A^N, A^-N) (1-q)^-(N+1)
  const double log_const = n_steps * std::log(4.0) + n_steps * std::abs(log_a) -
                           (n_steps + 1) * std::log1p(-q);
  int r_max = 32;
  while (true) {
    const double log_z = rw_log_partition(abcd, q, n_steps, r_max);
    const double log_tail = log_const + (r_max + 1) * log_ac - std::log1p(-ac);
    if (log_tail <= std::log(1e-12) + log_z) return r_max;
    if (r_max > 2000000) {
      throw DivergenceError("rw_stationary: offset truncation did not close");
    }
    r_max *= 2;
  }
}

double rw_log_partition(const AbcdParams& abcd, double q, int n_steps, int r_max) {
  require_fan_inputs(abcd);
  if (n_steps < 1) throw std::domain_error("rw_log_partition: n_steps must be positive");
  if (r_max == 0) r_max = rw_auto_r_max(abcd, q, n_steps);
  const double log_q = q > 0.0 ? std::log(q) : kNegInf;
  const double log_c = std::log(abcd.c_param);
  const std::size_t top = static_cast<std::size_t>(r_max) + n_steps;

  // f_i(j) sums weights over offsets r <= r_max and i-step prefixes with
  // n_i + r = j; the m component only contributes move multiplicities.
  std::vector<double> bracket(top + 2, 0.0);
  for (std::size_t j = 1; j <= top; ++j) {
    bracket[j] = std::exp(log_q_bracket(static_cast<double>(j), log_q));
  }
  std::vector<double> f(top + 2, 0.0), next(top + 2, 0.0);
  double log_scale = 0.0;
  for (int j = 1; j <= r_max; ++j) f[j] = std::exp(j * log_c) * bracket[j];
  for (int step = 0; step < n_steps; ++step) {
    next.assign(next.size(), 0.0);
    for (std::size_t j = 1; j <= top; ++j) {
      const double inflow = 2.0 * f[j] + f[j - 1] + f[j + 1];
      if (inflow > 0.0) next[j] = inflow * bracket[j];
    }
    f.swap(next);
    rescale_row(f, log_scale);
  }
  return log_dot_a_powers(f, std::log(abcd.a_param), log_scale);
}

FiniteLaw rw_increment_law(const AbcdParams& abcd, double q, int n_steps, int r_max) {
  if (n_steps < 1 || n_steps > kMaxIncrementSites) {
    throw CapacityError("rw_increment_law: n_steps outside [1, 12]");
  }
  if (r_max == 0) r_max = rw_auto_r_max(abcd, q, n_steps);
  const double log_q = q > 0.0 ? std::log(q) : kNegInf;
  const double log_c = std::log(abcd.c_param);
  const double log_a = std::log(abcd.a_param);
  const std::size_t top = static_cast<std::size_t>(r_max) + n_steps;

  std::vector<double> bracket(top + 2, 0.0);
  for (std::size_t j = 1; j <= top; ++j) {
    bracket[j] = std::exp(log_q_bracket(static_cast<double>(j), log_q));
  }
  std::vector<double> init(top + 2, 0.0);
  for (int j = 1; j <= r_max; ++j) init[j] = std::exp(j * log_c) * bracket[j];

  FiniteLaw law;
  law.atoms.reserve(1ull << n_steps);
  std::vector<double> f(top + 2), next(top + 2);
  std::vector<double> log_mass;
  log_mass.reserve(1ull << n_steps);
  for (std::uint64_t signs = 0; signs < (1ull << n_steps); ++signs) {
    f = init;
    double log_scale = 0.0;
    for (int step = 0; step < n_steps; ++step) {
      const int s = ((signs >> step) & 1ull) ? 1 : -1;
      next.assign(next.size(), 0.0);
      for (std::size_t j = 1; j <= top; ++j) {
        const std::size_t from = static_cast<std::size_t>(static_cast<long>(j) - s);
        const double inflow = f[j] + (from >= 1 && from <= top ? f[from] : 0.0);
        if (inflow > 0.0) next[j] = inflow * bracket[j];
      }
      f.swap(next);
      rescale_row(f, log_scale);
    }
    log_mass.push_back(log_dot_a_powers(f, log_a, log_scale));
  }
  double peak = kNegInf;
  for (double lm : log_mass) peak = std::max(peak, lm);
  double total = 0.0;
  for (double lm : log_mass) total += std::exp(lm - peak);
  for (std::uint64_t signs = 0; signs < log_mass.size(); ++signs) {
    law.atoms.emplace_back(signs, std::exp(log_mass[signs] - peak) / total);
  }
  return law;
}

}  // namespace okl
