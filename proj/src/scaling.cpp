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

#include "okl/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "okl/common.hpp"
#include "okl/kernels.hpp"
#include "okl/quadrature.hpp"

namespace okl {

namespace {

// n_x = sqrt(N) (x + log sqrt(N)), the positive-integer lattice index.
long lattice_index(double x, int n_steps) {
  const double root_n = std::sqrt(static_cast<double>(n_steps));
  return std::lround(root_n * (x + 0.5 * std::log(static_cast<double>(n_steps))));
}

double lattice_x(long n_x, int n_steps) {
  const double root_n = std::sqrt(static_cast<double>(n_steps));
  return static_cast<double>(n_x) / root_n -
         0.5 * std::log(static_cast<double>(n_steps));
}

struct LatticeRange {
  long lo = 1;
  long hi = 0;
};

LatticeRange lattice_range(const XWindow& window, int n_steps) {
  const double root_n = std::sqrt(static_cast<double>(n_steps));
  const double shift = 0.5 * std::log(static_cast<double>(n_steps));
  LatticeRange r;
  r.lo = std::max<long>(1, std::lround(std::ceil(root_n * (window.lo + shift) - 1e-9)));
  r.hi = std::lround(std::floor(root_n * (window.hi + shift) + 1e-9));
  if (r.hi < r.lo) throw std::domain_error("x window contains no lattice points");
  return r;
}

void require_exact_dp(const ScalingSpec& spec) {
  if (spec.n_steps > kMaxExactDpSteps) {
    throw CapacityError("exact transfer sum capped at N = 12; use sampling");
  }
}

}  // namespace

void RescaledPath::validate(int n_steps) const {
  if (g.size() != static_cast<std::size_t>(n_steps) + 1 || g.size() != h.size()) {
    throw std::domain_error("RescaledPath: component length mismatch");
  }
  if (g.front() != 0.0 || h.front() != 0.0) {
    throw std::domain_error("RescaledPath: paths start at 0");
  }
  const double step = 1.0 / std::sqrt(static_cast<double>(n_steps));
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double dg = g[i] - g[i - 1];
    const double dh = h[i] - h[i - 1];
    const bool g_moves = std::abs(std::abs(dg) - step) <= 1e-12 && std::abs(dh) <= 1e-12;
    const bool h_moves = std::abs(std::abs(dh) - step) <= 1e-12 && std::abs(dg) <= 1e-12;
    if (!(g_moves || h_moves)) {
      throw std::domain_error("RescaledPath: one component must move by N^{-1/2}");
    }
  }
}

double lattice_tilde_min(int n_steps) {
  return lattice_x(1, n_steps);
}

std::vector<double> lattice_tilde_z(int n_steps, double x_lo, double x_hi) {
  if (!(x_lo < x_hi)) throw std::domain_error("lattice_tilde_z: empty window");
  std::vector<double> out;
  const LatticeRange r = lattice_range({x_lo, x_hi}, n_steps);
  out.reserve(r.hi - r.lo + 1);
  for (long k = r.lo; k <= r.hi; ++k) out.push_back(lattice_x(k, n_steps));
  return out;
}

RnEval rn_r(const RescaledPath& path, const ScalingSpec& spec, bool relax_support) {
  spec.validate();
  const int n = spec.n_steps;
  const double root_n = std::sqrt(static_cast<double>(n));
  RnEval out;
  if (!relax_support) {
    path.validate(n);
    const double idx = root_n * path.x;
    if (std::abs(idx - std::lround(idx)) > 1e-9 || std::lround(idx) < 1) {
      out.log_value = kNegInf;
      return out;
    }
  }
  double log_v = -2.0 * (spec.u + spec.v) * path.x - 2.0 * spec.v * path.g.back();
  const double lq = spec.log_q();
  for (int i = 0; i <= n; ++i) {
    const double level = root_n * (path.g[i] + path.x);
    if (level < 0.5 && !relax_support) {  // integer levels <= 0 leave the support
      out.log_value = kNegInf;
      return out;
    }
    if (level <= 0.0) {
      out.log_value = kNegInf;
      return out;
    }
    log_v += log_q_bracket(level, lq);
  }
  out.log_value = log_v;
  out.in_support = true;
  return out;
}

RnEval rn_h(const RescaledPath& path, const ScalingSpec& spec, bool relax_support) {
  spec.validate();
  const int n = spec.n_steps;
  RnEval out;
  if (!relax_support) {
    path.validate(n);
    const double root_n = std::sqrt(static_cast<double>(n));
    const double shift = 0.5 * std::log(static_cast<double>(n));
    const double idx = root_n * (path.x + shift);
    if (std::abs(idx - std::lround(idx)) > 1e-9 || std::lround(idx) < 1) {
      out.log_value = kNegInf;
      return out;
    }
    // Support on the lattice is min_i sqrt(N)(g_i + x + log sqrt(N)) >= 1;
    // checked on integer levels so a level-0 factor cannot survive as a
    // rounding-sized positive number.
    double g_min = 0.0;
    for (double gi : path.g) g_min = std::min(g_min, gi);
    if (std::lround(root_n * (g_min + path.x + shift)) < 1) {
      out.log_value = kNegInf;
      return out;
    }
  }
  const double prod = kernels::sum_log1p_scaled_neg_exp(
      path.g, path.x, 1.0 / static_cast<double>(n));
  if (prod == kNegInf) {
    out.log_value = kNegInf;
    return out;
  }
  out.log_value =
      -2.0 * (spec.u + spec.v) * path.x - 2.0 * spec.v * path.g.back() + prod;
  out.in_support = true;
  return out;
}

double lambert_w0(double a) {
  if (!(a >= 0.0)) throw std::domain_error("lambert_w0: negative argument");
  if (a == 0.0) return 0.0;
  double w = a < M_E ? a / M_E : std::log(a) - std::log(std::max(1.0, std::log(a)));
  w = std::max(w, 1e-12);
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - a;
    const double step = f / (ew * (1.0 + w));
    w -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

double envelope_bound(double x, double u, double v, double length) {
  const double kv = std::abs(v) < 1e-12
                        ? length / 16.0
                        : std::expm1(4.0 * v * length) / (64.0 * v);
  const double w = lambert_w0(std::exp(-x) * std::sqrt(kv));
  return std::exp(-2.0 * (u + v) * x - w * w);
}

XWindow default_x_window(const ScalingSpec& spec) {
  spec.validate();
  double best_x = 0.0;
  double best = -1.0;
  for (double x = -20.0; x <= 80.0; x += 0.25) {
    const double b = envelope_bound(x, spec.u, spec.v, spec.length);
    if (b > best) {
      best = b;
      best_x = x;
    }
  }
  XWindow w;
  w.lo = lattice_tilde_min(spec.n_steps);
  w.hi = std::max(best_x + 30.0 / (2.0 * (spec.u + spec.v)), w.lo + 1.0);
  return w;
}

double zn_right_tail_log_bound(const ScalingSpec& spec, double x_hi) {
  const int n = spec.n_steps;
  const double lq = spec.log_q();
  // per-step MGF of -2v dg: (cosh(2v/sqrt(N)) + 1)/2
  const double log_mgf =
      n * std::log(0.5 * (1.0 + std::cosh(2.0 * spec.v / std::sqrt(static_cast<double>(n)))));
  const double log_rho = (spec.u + spec.v) * lq;  // lattice ratio q^{u+v}
  const long k_hi = lattice_index(x_hi, n);
  return (spec.u + spec.v - 0.5) * std::log(static_cast<double>(n)) + log_mgf +
         (k_hi + 1) * log_rho - std::log1p(-std::exp(log_rho));
}

XWindow sound_x_window(const ScalingSpec& spec) {
  XWindow w = default_x_window(spec);
  if (spec.n_steps <= kMaxExactDpSteps) {
    double base = zn_partition_exact(spec, w);
    for (int round = 0; round < 20; ++round) {
      XWindow wide{w.lo, w.hi + (w.hi - w.lo)};
      const double wider = zn_partition_exact(spec, wide);
      const bool tail_ok =
          zn_right_tail_log_bound(spec, w.hi) <= std::log(1e-9 * wider);
      if (std::abs(wider - base) <= 1e-8 * std::abs(wider) && tail_ok) return w;
      w = wide;
      base = wider;
    }
    throw DivergenceError("sound_x_window: widening did not stabilize");
  }
  // Above the exact cap: the right-tail bound against a nearby exact
  // reference (Z^(N) is bounded and slowly varying in N).
  ScalingSpec ref = spec;
  ref.n_steps = kMaxExactDpSteps;
  const double z_ref = zn_partition_exact(ref, sound_x_window(ref));
  for (int round = 0; round < 40; ++round) {
    if (zn_right_tail_log_bound(spec, w.hi) <= std::log(1e-9 * z_ref)) return w;
    w.hi += 0.5 * (w.hi - w.lo);
  }
  throw DivergenceError("sound_x_window: right tail bound did not close");
}

double zn_partition_exact(const ScalingSpec& spec, const XWindow& window) {
  require_exact_dp(spec);
  return zn_partition_transfer(spec, window);
}

double zn_partition_transfer(const ScalingSpec& spec, const XWindow& window) {
  spec.validate();
  const int n = spec.n_steps;
  const double lq = spec.log_q();
  const LatticeRange range = lattice_range(window, n);
  const std::size_t top = static_cast<std::size_t>(range.hi) + n;

  // mass per (x = n_x, path) is (1/4)^N N^{u+v} C^{n_x} A^{j_N}
  // prod_i (1 - q^{j_i}); the transfer sum runs over j = n_i + n_x.
  std::vector<double> one_minus_q(top + 2, 0.0);
  for (std::size_t j = 1; j <= top; ++j) {
    one_minus_q[j] = -std::expm1(static_cast<double>(j) * lq);
  }
  std::vector<double> f(top + 2, 0.0), next(top + 2, 0.0);
  const double log_c = spec.u * lq;
  for (long j = range.lo; j <= range.hi; ++j) {
    f[j] = std::exp(j * log_c) * one_minus_q[j];
  }
  for (int step = 0; step < n; ++step) {
    next.assign(next.size(), 0.0);
    for (std::size_t j = 1; j <= top; ++j) {
      const double inflow = 2.0 * f[j] + f[j - 1] + f[j + 1];
      if (inflow > 0.0) next[j] = 0.25 * inflow * one_minus_q[j];
    }
    f.swap(next);
  }
  const double log_a = spec.v * lq;
  double acc = 0.0;
  for (std::size_t j = 1; j <= top; ++j) {
    if (f[j] > 0.0) acc += std::exp(static_cast<double>(j) * log_a) * f[j];
  }
  const double log_pref =
      (spec.u + spec.v - 0.5) * std::log(static_cast<double>(n));
  return std::exp(log_pref) * acc;
}

namespace {

struct WalkSampler {
  const ScalingSpec& spec;
  const LatticeRange range;
  const double root_n_inv;
  std::vector<double> g_buf;

  explicit WalkSampler(const ScalingSpec& s, const LatticeRange& r)
      : spec(s), range(r),
        root_n_inv(1.0 / std::sqrt(static_cast<double>(s.n_steps))),
        g_buf(s.n_steps + 1) {}

  // One proposal draw: x uniform on the lattice window, unweighted SSRW.
  // Returns the unnormalized weight H^(N) and the endpoint functionals.
  // The support cut runs on integer lattice levels, matching the exact
  // transfer sums.
  void draw(Rng& rng, double& weight, double& x_out, double& g_end, double& h_end) {
    const long n_x = range.lo + static_cast<long>(rng.uniform_below(
                                    static_cast<std::uint64_t>(range.hi - range.lo + 1)));
    const double x = lattice_x(n_x, spec.n_steps);
    const int n = spec.n_steps;
    double g = 0.0, h = 0.0;
    long level = n_x;
    long level_min = n_x;
    g_buf[0] = 0.0;
    std::uint64_t bits = 0;
    int bits_left = 0;
    for (int i = 1; i <= n; ++i) {
      if (bits_left == 0) {
        bits = rng.next_u64();
        bits_left = 32;
      }
      const unsigned move = bits & 3ull;
      bits >>= 2;
      --bits_left;
      switch (move) {
        case 0: g += root_n_inv; ++level; break;
        case 1: g -= root_n_inv; --level; break;
        case 2: h += root_n_inv; break;
        default: h -= root_n_inv; break;
      }
      level_min = std::min(level_min, level);
      g_buf[i] = g;
    }
    if (level_min < 1) {
      weight = 0.0;
    } else {
      const double log_prod = kernels::sum_log1p_scaled_neg_exp(
          g_buf, x, 1.0 / static_cast<double>(n));
      const double log_w =
          log_prod == kNegInf
              ? kNegInf
              : -2.0 * (spec.u + spec.v) * x - 2.0 * spec.v * g + log_prod;
      weight = log_w == kNegInf ? 0.0 : std::exp(log_w);
    }
    x_out = x;
    g_end = g;
    h_end = h;
  }
};

}  // namespace

IsEstimate zn_partition_is(const ScalingSpec& spec, const XWindow& window,
                           long n_samples, std::uint64_t seed, int workers,
                           double ess_floor) {
  spec.validate();
  if (n_samples < kSamplerShards) throw std::domain_error("zn_partition_is: too few samples");
  const LatticeRange range = lattice_range(window, spec.n_steps);
  const double lattice_count = static_cast<double>(range.hi - range.lo + 1);

  const long per_shard = n_samples / kSamplerShards;
  std::vector<double> shard_sum(kSamplerShards, 0.0), shard_sumsq(kSamplerShards, 0.0);
  run_sharded(workers, [&](int s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    WalkSampler sampler(spec, range);
    double w, x, ge, he;
    double acc = 0.0, acc2 = 0.0;
    for (long i = 0; i < per_shard; ++i) {
      sampler.draw(rng, w, x, ge, he);
      acc += w;
      acc2 += w * w;
    }
    shard_sum[s] = acc;
    shard_sumsq[s] = acc2;
  });
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < kSamplerShards; ++s) {
    sum += shard_sum[s];
    sumsq += shard_sumsq[s];
  }
  const double n = static_cast<double>(per_shard) * kSamplerShards;
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean) / (n - 1.0);
  const double scale =
      lattice_count / std::sqrt(static_cast<double>(spec.n_steps));
  IsEstimate est;
  est.value = scale * mean;
  est.std_error = scale * std::sqrt(var);
  est.ess = sumsq > 0.0 ? sum * sum / sumsq : 0.0;
  est.n_samples = static_cast<long>(n);
  if (est.ess < ess_floor) {
    throw EssError("zn_partition_is: effective sample size below the gate", est.ess);
  }
  return est;
}

QnSampleBatch qn_sample(const ScalingSpec& spec, const XWindow& window,
                        long n_samples, std::uint64_t seed, int workers,
                        double ess_floor) {
  spec.validate();
  if (n_samples < kSamplerShards) throw std::domain_error("qn_sample: too few samples");
  const LatticeRange range = lattice_range(window, spec.n_steps);
  const long per_shard = n_samples / kSamplerShards;
  const long total = per_shard * kSamplerShards;

  QnSampleBatch batch;
  batch.x.resize(total);
  batch.g_end.resize(total);
  batch.h_end.resize(total);
  batch.gh_end.resize(total);
  batch.weights.resize(total);
  run_sharded(workers, [&](int s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    WalkSampler sampler(spec, range);
    double w, x, ge, he;
    for (long i = 0; i < per_shard; ++i) {
      const long idx = s * per_shard + i;
      sampler.draw(rng, w, x, ge, he);
      batch.x[idx] = x;
      batch.g_end[idx] = ge;
      batch.h_end[idx] = he;
      batch.gh_end[idx] = ge + he;
      batch.weights[idx] = w;
    }
  });
  batch.ess = ess(batch.weights);
  if (batch.ess < ess_floor) {
    throw EssError("qn_sample: effective sample size below the gate", batch.ess);
  }
  double sum = 0.0;
  for (double w : batch.weights) sum += w;
  for (double& w : batch.weights) w /= sum;
  return batch;
}

QnMarginals qn_exact_marginals(const ScalingSpec& spec, const XWindow& window) {
  spec.validate();
  require_exact_dp(spec);
  const int n = spec.n_steps;
  const double lq = spec.log_q();
  const double root_n = std::sqrt(static_cast<double>(n));
  const LatticeRange range = lattice_range(window, n);
  const long j_top = range.hi + n;
  const double log_a = spec.v * lq;
  const double log_c = spec.u * lq;

  std::vector<double> one_minus_q(j_top + 2, 0.0);
  for (long j = 1; j <= j_top; ++j) one_minus_q[j] = -std::expm1(j * lq);

  QnMarginals out;

  // Joint DP over (j, s = sqrt(N)(g+h), k = m-move count, t = m-up count):
  // small enough at N <= 12 to tabulate everything at once. Index layout:
  // idx = ((j * (n+1) + k) * (n+1) + t) * (2n+1) + (s+n).
  // From it: x/g(L) need a per-x pass instead (j alone loses x), so the
  // x and g(L) laws run their own per-offset DP below.
  const long js = j_top + 2;
  const long ks = n + 1;
  const long ss = 2 * n + 1;
  auto idx4 = [&](long j, long k, long t, long s_shift) {
    return ((j * ks + k) * ks + t) * ss + s_shift;
  };
  std::vector<double> dp(static_cast<std::size_t>(js) * ks * ks * ss, 0.0);
  for (long j = range.lo; j <= range.hi; ++j) {
    dp[idx4(j, 0, 0, n)] = std::exp(j * log_c) * one_minus_q[j];
  }
  std::vector<double> dp_next(dp.size());
  for (int step = 1; step <= n; ++step) {
    std::fill(dp_next.begin(), dp_next.end(), 0.0);
    for (long j = 1; j <= j_top; ++j) {
      const double factor = 0.25 * one_minus_q[j];
      for (long k = 0; k <= step; ++k) {
        for (long t = 0; t <= k; ++t) {
          for (long s = -step; s <= step; ++s) {
            // inflows: n+1 from (j-1, k, t, s-1); n-1 from (j+1, k, t, s+1);
            // m+1 from (j, k-1, t-1, s-1); m-1 from (j, k-1, t, s+1)
            const bool s_down_ok = s - 1 >= -n;
            const bool s_up_ok = s + 1 <= n;
            double inflow = 0.0;
            if (j - 1 >= 1 && s_down_ok) inflow += dp[idx4(j - 1, k, t, s - 1 + n)];
            if (j + 1 <= j_top && s_up_ok) inflow += dp[idx4(j + 1, k, t, s + 1 + n)];
            if (k >= 1) {
              if (t >= 1 && s_down_ok) inflow += dp[idx4(j, k - 1, t - 1, s - 1 + n)];
              if (s_up_ok) inflow += dp[idx4(j, k - 1, t, s + 1 + n)];
            }
            if (inflow != 0.0) dp_next[idx4(j, k, t, s + n)] = factor * inflow;
          }
        }
      }
    }
    dp.swap(dp_next);
  }

  // Collapse with the A^{j_N} end weight.
  std::vector<double> mass_s(ss, 0.0);
  std::vector<double> mass_h(ss, 0.0);
  std::vector<std::vector<double>> mass_kt(ks, std::vector<double>(ks, 0.0));
  double total = 0.0;
  for (long j = 1; j <= j_top; ++j) {
    const double aw = std::exp(j * log_a);
    for (long k = 0; k <= n; ++k) {
      for (long t = 0; t <= k; ++t) {
        for (long s = -n; s <= n; ++s) {
          const double m = dp[idx4(j, k, t, s + n)] * aw;
          if (m == 0.0) continue;
          mass_s[s + n] += m;
          // h(L) = (2t - k)/sqrt(N)
          mass_h[(2 * t - k) + n] += m;
          mass_kt[k][t] += m;
          total += m;
        }
      }
    }
  }
  if (!(total > 0.0)) throw std::runtime_error("qn_exact_marginals: zero mass");

  for (long s = -n; s <= n; ++s) {
    if (mass_s[s + n] > 0.0) {
      out.gh_end_law.atoms.emplace_back(s / root_n, mass_s[s + n] / total);
    }
    if (mass_h[s + n] > 0.0) {
      out.h_end_law.atoms.emplace_back(s / root_n, mass_h[s + n] / total);
    }
  }
  out.gh_end_law.sort_and_merge();
  out.h_end_law.sort_and_merge();

  // Conditional law of the m-sign sum given k m-moves against the exact
  // +-binomial: the weight never looks at t, so the TV must vanish.
  out.h_conditional_tv = 0.0;
  for (long k = 0; k <= n; ++k) {
    double mk = 0.0;
    for (long t = 0; t <= k; ++t) mk += mass_kt[k][t];
    if (mk <= 0.0) continue;
    double tv = 0.0;
    for (long t = 0; t <= k; ++t) {
      const double got = mass_kt[k][t] / mk;
      const double want = std::exp(std::lgamma(k + 1.0) - std::lgamma(t + 1.0) -
                                   std::lgamma(k - t + 1.0) - k * std::log(2.0));
      tv += std::abs(got - want);
    }
    out.h_conditional_tv = std::max(out.h_conditional_tv, 0.5 * tv);
  }

  // Per-offset DP over j for the x and g(L) laws.
  std::vector<double> f((j_top + 2), 0.0), nx((j_top + 2), 0.0);
  for (long n_x = range.lo; n_x <= range.hi; ++n_x) {
    std::fill(f.begin(), f.end(), 0.0);
    f[n_x] = one_minus_q[n_x];
    for (int step = 0; step < n; ++step) {
      std::fill(nx.begin(), nx.end(), 0.0);
      for (long j = 1; j <= j_top; ++j) {
        const double inflow = 2.0 * f[j] + f[j - 1] + f[j + 1];
        if (inflow > 0.0) nx[j] = 0.25 * inflow * one_minus_q[j];
      }
      f.swap(nx);
    }
    const double pref = std::exp(n_x * log_c);
    double x_mass = 0.0;
    for (long j = 1; j <= j_top; ++j) {
      if (f[j] <= 0.0) continue;
      const double m = pref * std::exp(j * log_a) * f[j];
      x_mass += m;
      out.g_end_law.atoms.emplace_back((j - n_x) / root_n, m / total);
    }
    out.x_law.atoms.emplace_back(lattice_x(n_x, n), x_mass / total);
  }
  out.x_law.sort_and_merge(1e-12);
  out.g_end_law.sort_and_merge(1e-12);

  // Sign-sequence law: one j-DP per sign word.
  std::vector<double> log_mass;
  log_mass.reserve(1ull << n);
  for (std::uint64_t signs = 0; signs < (1ull << n); ++signs) {
    std::fill(f.begin(), f.end(), 0.0);
    for (long j = range.lo; j <= range.hi; ++j) {
      f[j] = std::exp(j * log_c) * one_minus_q[j];
    }
    for (int step = 0; step < n; ++step) {
      const int s = ((signs >> step) & 1ull) ? 1 : -1;
      std::fill(nx.begin(), nx.end(), 0.0);
      for (long j = 1; j <= j_top; ++j) {
        const long from = j - s;
        const double inflow = f[j] + (from >= 1 && from <= j_top ? f[from] : 0.0);
        if (inflow > 0.0) nx[j] = inflow * one_minus_q[j];
      }
      f.swap(nx);
    }
    double acc = 0.0;
    for (long j = 1; j <= j_top; ++j) {
      if (f[j] > 0.0) acc += std::exp(j * log_a) * f[j];
    }
    log_mass.push_back(acc > 0.0 ? std::log(acc) : kNegInf);
  }
  double peak = kNegInf;
  for (double lm : log_mass) peak = std::max(peak, lm);
  double sign_total = 0.0;
  for (double lm : log_mass) sign_total += std::exp(lm - peak);
  for (std::uint64_t signs = 0; signs < log_mass.size(); ++signs) {
    out.sign_law.atoms.emplace_back(signs,
                                    std::exp(log_mass[signs] - peak) / sign_total);
  }
  return out;
}

std::vector<PointwiseRow> pointwise_convergence_check(
    const std::function<double(double)>& g, double x, double u, double v,
    double length, std::span<const int> n_ladder) {
  if (!(u + v > 0.0)) throw std::domain_error("pointwise check: u + v must be positive");
  const double integral = adaptive_simpson(
      [&](double t) { return std::exp(-2.0 * g(t)); }, 0.0, length, 1e-13);
  const double limit_sum = std::exp(-2.0 * x) * integral;
  const double h_limit =
      std::exp(-2.0 * (u + v) * x - 2.0 * v * g(length) - limit_sum);

  std::vector<PointwiseRow> rows;
  rows.reserve(n_ladder.size());
  std::vector<double> gs;
  for (int n : n_ladder) {
    gs.resize(n + 1);
    for (int i = 0; i <= n; ++i) gs[i] = g(length * i / static_cast<double>(n));
    PointwiseRow row;
    row.n_steps = n;
    row.h_limit = h_limit;

    const double log_prod =
        kernels::sum_log1p_scaled_neg_exp(gs, x, 1.0 / static_cast<double>(n));
    row.h_discrete =
        log_prod == kNegInf
            ? 0.0
            : std::exp(-2.0 * (u + v) * x - 2.0 * v * gs.back() + log_prod);
    row.abs_error = std::abs(row.h_discrete - h_limit);

    double max_c = 0.0, sum_c = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double c = std::exp(-2.0 * (gs[i] + x)) / n;
      max_c = std::max(max_c, c);
      sum_c += c;
    }
    row.max_factor = max_c;
    row.sum_gap = std::abs(sum_c - limit_sum);
    row.abs_sum = sum_c;
    row.taylor_tail = log_prod == kNegInf ? kNegInf : log_prod + sum_c;
    rows.push_back(row);
  }
  return rows;
}

double comb_ratio(double a, long k, long n) {
  if (n < 1) throw std::domain_error("comb_ratio: n must be positive");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double cap = std::pow(static_cast<double>(n), 5.0 / 6.0);
  if (!(std::abs(static_cast<double>(k)) < cap &&
        std::abs(k + a * root_n) < cap)) {
    throw std::domain_error("comb_ratio: k outside the N^(5/6) domain");
  }
  const long shift = std::lround(a * root_n);
  const long m1 = n + k;
  const long m2 = n + k + shift;
  if (m1 < 0 || m1 > 2 * n || m2 < 0 || m2 > 2 * n) {
    throw std::domain_error("comb_ratio: binomial index out of range");
  }
  auto lchoose = [n](long m) {
    return std::lgamma(2.0 * n + 1.0) - std::lgamma(m + 1.0) -
           std::lgamma(2.0 * n - m + 1.0);
  };
  return std::exp(-2.0 * a * k / root_n + lchoose(m1) - lchoose(m2));
}

CombSup combapprox_sup(double a, long n) {
  const double root_n = std::sqrt(static_cast<double>(n));
  CombSup out;
  for (int i = -60; i <= 60; ++i) {
    const double c = i / 20.0;
    const long k = std::lround(c * root_n);
    const double cap = std::pow(static_cast<double>(n), 5.0 / 6.0);
    if (!(std::abs(static_cast<double>(k)) < cap && std::abs(k + a * root_n) < cap)) {
      continue;
    }
    const double r = comb_ratio(a, k, n);
    ++out.grid_size;
    if (r > out.sup_ratio) {
      out.sup_ratio = r;
      out.argmax_k = k;
    }
  }
  if (out.grid_size == 0) throw std::domain_error("combapprox_sup: empty admissible grid");
  return out;
}

}  // namespace okl
