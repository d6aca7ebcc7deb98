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

#include "okl/kpz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "okl/bessel.hpp"
#include "okl/common.hpp"
#include "okl/kernels.hpp"

namespace okl {

namespace {

void check_measure_params(double u, double v, double length, long n) {
  if (!(u + v > 0.0)) throw std::domain_error("kpz: fan region requires u + v > 0");
  if (!(length > 0.0)) throw std::domain_error("kpz: length must be positive");
  if (n < kSamplerShards) throw std::domain_error("kpz: too few samples");
}

// x-profile shape e^{-2(u+v)x} K_0(sqrt(2) e^{-x}) used to place the
// integration window; the widening check is what certifies it.
double profile_shape(double x, double u, double v) {
  const double z = std::sqrt(2.0) * std::exp(-x);
  if (z > 650.0) return 0.0;
  return std::exp(-2.0 * (u + v) * x) * bessel_k(0.0, z);
}

struct ContinuumWindow {
  double lo, hi, peak;
};

ContinuumWindow continuum_x_window(double u, double v) {
  double best_x = 0.0, best = -1.0;
  for (double x = -25.0; x <= 100.0; x += 0.25) {
    const double f = profile_shape(x, u, v);
    if (f > best) {
      best = f;
      best_x = x;
    }
  }
  ContinuumWindow w{best_x, best_x, best_x};
  while (profile_shape(w.lo, u, v) > 1e-16 * best) w.lo -= 0.5;
  while (profile_shape(w.hi, u, v) > 1e-16 * best) w.hi += 0.5;
  return w;
}

// Per-path functionals of the g component: the left-endpoint Riemann sum
// of e^{-2g} and the endpoint.
struct GPathStats {
  std::vector<double> integral;
  std::vector<double> g_end;
};

GPathStats sample_g_paths(long n_paths, std::uint64_t seed,
                          const BrownianPathSpec& grid, int workers) {
  const int m = grid.n_grid;
  const double sigma = std::sqrt(0.5 * grid.length / m);
  const long per_shard = n_paths / kSamplerShards;
  const long total = per_shard * kSamplerShards;
  GPathStats stats;
  stats.integral.resize(total);
  stats.g_end.resize(total);
  run_sharded(workers, [&](int s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    std::vector<double> g(m + 1);
    for (long i = 0; i < per_shard; ++i) {
      double cur = 0.0;
      g[0] = 0.0;
      for (int k = 1; k <= m; ++k) {
        cur += sigma * rng.normal();
        g[k] = cur;
      }
      const long idx = s * per_shard + i;
      stats.integral[idx] = (grid.length / m) *
                            kernels::sum_exp_scaled({g.data(), static_cast<std::size_t>(m)}, -2.0);
      stats.g_end[idx] = cur;
    }
  });
  return stats;
}

// Trapezoid nodes and combined weights a_k = w_k e^{-2(u+v)x_k}, b_k = e^{-2x_k}.
struct XGrid {
  std::vector<double> a;
  std::vector<double> b;
};

XGrid build_x_grid(double lo, double hi, double u, double v, double dx) {
  const long n = std::max<long>(8, std::lround(std::ceil((hi - lo) / dx)));
  XGrid grid;
  grid.a.resize(n + 1);
  grid.b.resize(n + 1);
  const double step = (hi - lo) / n;
  for (long k = 0; k <= n; ++k) {
    const double x = lo + k * step;
    const double w = (k == 0 || k == n) ? 0.5 * step : step;
    grid.a[k] = w * std::exp(-2.0 * (u + v) * x);
    grid.b[k] = std::exp(-2.0 * x);
  }
  return grid;
}

}  // namespace

double kpz_log_weight(double x, std::span<const double> g, double length,
                      double u, double v) {
  if (g.size() < 2) throw std::domain_error("kpz_log_weight: need a grid path");
  if (g.front() != 0.0) throw std::domain_error("kpz_log_weight: g(0) must be 0");
  const std::size_t m = g.size() - 1;
  const double riemann =
      (length / static_cast<double>(m)) * kernels::sum_exp_scaled(g.first(m), -2.0);
  return -2.0 * (u + v) * x - 2.0 * v * g.back() - std::exp(-2.0 * x) * riemann;
}

ZEstimate z_continuum(double u, double v, double length, long n_paths,
                      std::uint64_t seed, const BrownianPathSpec& grid,
                      int workers) {
  check_measure_params(u, v, length, n_paths);
  const GPathStats stats = sample_g_paths(n_paths, seed, grid, workers);
  const long total = static_cast<long>(stats.integral.size());

  const ContinuumWindow start = continuum_x_window(u, v);
  double lo = start.lo, hi = start.hi;
  constexpr double dx = 0.02;

  std::vector<double> z_paths(total);
  const auto evaluate = [&](double wlo, double whi, double& mean, double& se) {
    const XGrid xg = build_x_grid(wlo, whi, u, v, dx);
    std::vector<double> shard_sum(kSamplerShards, 0.0), shard_sumsq(kSamplerShards, 0.0);
    const long per_shard = total / kSamplerShards;
    run_sharded(workers, [&](int s) {
      double acc = 0.0, acc2 = 0.0;
      for (long i = s * per_shard; i < (s + 1) * per_shard; ++i) {
        const double zp = std::exp(-2.0 * v * stats.g_end[i]) *
                          kernels::dot_exp_scaled(xg.b, xg.a, -stats.integral[i]);
        z_paths[i] = zp;
        acc += zp;
        acc2 += zp * zp;
      }
      shard_sum[s] = acc;
      shard_sumsq[s] = acc2;
    });
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < kSamplerShards; ++s) {
      sum += shard_sum[s];
      sumsq += shard_sumsq[s];
    }
    mean = sum / total;
    const double var = std::max(0.0, sumsq / total - mean * mean) / (total - 1.0);
    se = std::sqrt(var);
  };

  double mean = 0.0, se = 0.0;
  evaluate(lo, hi, mean, se);
  bool settled = false;
  for (int round = 0; round < 12; ++round) {
    const double width = hi - lo;
    const double wlo = lo - 0.5 * width;
    const double whi = hi + 0.5 * width;
    double mean2 = 0.0, se2 = 0.0;
    evaluate(wlo, whi, mean2, se2);
    const bool ok = std::abs(mean2 - mean) <= 1e-8 * std::abs(mean2);
    lo = wlo;
    hi = whi;
    mean = mean2;
    se = se2;
    if (ok) {
      settled = true;
      break;
    }
  }
  if (!settled || !std::isfinite(mean)) {
    throw DivergenceError("z_continuum: window widening did not settle");
  }
  ZEstimate out;
  out.value = mean;
  out.std_error = se;
  out.window_lo = lo;
  out.window_hi = hi;
  out.n_paths = total;
  return out;
}

KpzSampleBatch kpz_q_sample(double u, double v, double length, long n_samples,
                            std::uint64_t seed, const BrownianPathSpec& grid,
                            int workers, double ess_floor) {
  check_measure_params(u, v, length, n_samples);
  const ContinuumWindow window = continuum_x_window(u, v);
  const int m = grid.n_grid;
  const double sigma = std::sqrt(0.5 * length / m);
  const long per_shard = n_samples / kSamplerShards;
  const long total = per_shard * kSamplerShards;

  KpzSampleBatch batch;
  batch.x.resize(total);
  batch.g_end.resize(total);
  batch.h_end.resize(total);
  batch.gh_end.resize(total);
  batch.gh_mid.resize(total);
  batch.weights.resize(total);

  // x proposal: equal mixture of a uniform over the bulk [peak-4, peak+3]
  // (the target turns off double-exponentially on the left of the peak)
  // and an exp(-2(u+v)x) tail on [peak+3, hi] matching the target's right
  // decay.
  const double rate = 2.0 * (u + v);
  const double bulk_lo = window.peak - 4.0;
  const double bulk_hi = window.peak + 3.0;
  const double tail_hi = std::max(window.hi, bulk_hi + 1.0);
  const double e_mid = std::exp(-rate * bulk_hi);
  const double e_hi = std::exp(-rate * tail_hi);
  const double log_q_bulk = std::log(0.5 / (bulk_hi - bulk_lo));
  const double log_q_tail_const = std::log(0.5 * rate / (e_mid - e_hi));
  run_sharded(workers, [&](int s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    std::vector<double> g(m + 1);
    for (long i = 0; i < per_shard; ++i) {
      const long idx = s * per_shard + i;
      double x, log_q;
      if (rng.uniform() < 0.5) {
        x = bulk_lo + rng.uniform() * (bulk_hi - bulk_lo);
        log_q = log_q_bulk;
      } else {
        x = -std::log(e_mid - rng.uniform() * (e_mid - e_hi)) / rate;
        log_q = log_q_tail_const - rate * x;
      }
      double gc = 0.0, hc = 0.0, g_mid = 0.0, h_mid = 0.0;
      g[0] = 0.0;
      for (int k = 1; k <= m; ++k) {
        gc += sigma * rng.normal();
        hc += sigma * rng.normal();
        g[k] = gc;
        if (k == m / 2) {
          g_mid = gc;
          h_mid = hc;
        }
      }
      const double riemann =
          (length / m) * kernels::sum_exp_scaled({g.data(), static_cast<std::size_t>(m)}, -2.0);
      batch.x[idx] = x;
      batch.g_end[idx] = gc;
      batch.h_end[idx] = hc;
      batch.gh_end[idx] = gc + hc;
      batch.gh_mid[idx] = g_mid + h_mid;
      const double log_h = -2.0 * (u + v) * x - 2.0 * v * gc -
                           std::exp(-2.0 * x) * riemann;
      batch.weights[idx] = std::exp(log_h - log_q);
    }
  });

  batch.ess = ess(batch.weights);
  if (batch.ess < ess_floor) {
    throw EssError("kpz_q_sample: effective sample size below the gate", batch.ess);
  }
  double sum = 0.0;
  for (double w : batch.weights) sum += w;
  for (double& w : batch.weights) w /= sum;
  return batch;
}

std::vector<EnvelopeRatio> kpz_envelope_ratios(double u, double v, double length,
                                               long n_paths, std::uint64_t seed,
                                               std::span<const double> xs,
                                               const BrownianPathSpec& grid) {
  check_measure_params(u, v, length, n_paths);
  const GPathStats stats = sample_g_paths(n_paths, seed, grid, 1);
  std::vector<EnvelopeRatio> out;
  out.reserve(xs.size());
  for (double x : xs) {
    double acc = 0.0;
    const double lam = std::exp(-2.0 * x);
    for (std::size_t i = 0; i < stats.integral.size(); ++i) {
      acc += std::exp(-2.0 * v * stats.g_end[i] - lam * stats.integral[i]);
    }
    const double mean = acc / static_cast<double>(stats.integral.size());
    EnvelopeRatio row;
    row.x = x;
    row.ratio = mean / bessel_k(0.0, std::sqrt(2.0) * std::exp(-x));
    out.push_back(row);
  }
  return out;
}

}  // namespace okl
