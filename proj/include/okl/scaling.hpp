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

#ifndef OKL_SCALING_HPP
#define OKL_SCALING_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "okl/params.hpp"
#include "okl/stats.hpp"

namespace okl {

// Rescaled walk paths: N steps on [0, L], one component moving by
// +-N^{-1/2} per step. x is the starting offset; for the recentered
// weight H^(N) it lives on the lattice
//   Z~(N) = { x : sqrt(N) (x + log sqrt(N)) in Z_{>0} }.

struct RescaledPath {
  double x = 0.0;
  std::vector<double> g;  // length N+1, g[0] = 0
  std::vector<double> h;  // length N+1, h[0] = 0

  void validate(int n_steps) const;
};

struct RnEval {
  double log_value = 0.0;  // -inf outside the support
  bool in_support = false;
};

/// Minimal element of Z~(N): N^{-1/2} - (1/2) log N.
double lattice_tilde_min(int n_steps);

/// All lattice points of Z~(N) inside [x_lo, x_hi].
std::vector<double> lattice_tilde_z(int n_steps, double x_lo, double x_hi);

/// R^(N)(x, g, h): exp(-2(u+v)x - 2v g(L)) prod [sqrt(N)(g(t_i)+x)]_q.
/// Requires sqrt(N) x in Z_{>0} unless relax_support; value 0 when any
/// bracket index is <= 0.
RnEval rn_r(const RescaledPath& path, const ScalingSpec& spec,
            bool relax_support = false);

/// H^(N)(x, g, h): exp(-2(u+v)x - 2v g(L)) prod (1 - e^{-2(g(t_i)+x)}/N).
/// Requires x in Z~(N) unless relax_support.
RnEval rn_h(const RescaledPath& path, const ScalingSpec& spec,
            bool relax_support = false);

/// Lambert W_0 by Newton iteration (a >= 0).
double lambert_w0(double a);

/// Shape of the x-dependence bound for E_walk[H^(N)(x, .)]:
/// exp(-2(u+v)x) exp(-W(e^{-x} sqrt(K_v))^2), K_v = (1/16) int_0^L e^{4vt} dt.
double envelope_bound(double x, double u, double v, double length);

struct XWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Starting window: the whole left lattice (lo = x~, which is finite) and
/// hi = x* + 30/(2(u+v)) with x* the argmax of the envelope.
XWindow default_x_window(const ScalingSpec& spec);

/// log of a rigorous bound on the lattice mass to the right of x_hi:
/// E_walk[H^(N)(x,.)] <= e^{-2(u+v)x} E[e^{-2v g(L)}] since every factor
/// lies in (0,1); the x-sum is geometric.
double zn_right_tail_log_bound(const ScalingSpec& spec, double x_hi);

/// default_x_window widened on the right until the tail bound drops below
/// 1e-9 of the partition function and, for N <= 12, an exact widening
/// check moves the value by less than 1e-8 relative.
XWindow sound_x_window(const ScalingSpec& spec);

/// Z^(N) = N^{-1/2} sum_{x in window} E_walk[H^(N)(x,.)], exact transfer
/// sum over the n component (the h component integrates out). N <= 12.
double zn_partition_exact(const ScalingSpec& spec, const XWindow& window);

/// The same transfer sum without the size cap; polynomial cost, used as a
/// convergence oracle where sampling noise would get in the way.
double zn_partition_transfer(const ScalingSpec& spec, const XWindow& window);

inline constexpr int kMaxExactDpSteps = 12;

struct IsEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  long n_samples = 0;
};

/// Importance-sampling estimate of Z^(N): x uniform on the lattice window,
/// paths unweighted SSRW, weight H^(N). Throws EssError below ess_floor.
IsEstimate zn_partition_is(const ScalingSpec& spec, const XWindow& window,
                           long n_samples, std::uint64_t seed, int workers = 1,
                           double ess_floor = 100.0);

struct QnMarginals {
  RealLaw x_law;
  RealLaw g_end_law;
  RealLaw h_end_law;
  RealLaw gh_end_law;
  FiniteLaw sign_law;        // increment signs, bit i-1 set = step i upward
  double h_conditional_tv;   // max_k TV(h(L) | k m-moves, +-binomial)
};

/// Exact marginal laws of (x, g(L), h(L), g(L)+h(L)) and the full sign law
/// under Q^(N), restricted to the x window. N <= 12.
QnMarginals qn_exact_marginals(const ScalingSpec& spec, const XWindow& window);

struct QnSampleBatch {
  std::vector<double> x;
  std::vector<double> g_end;
  std::vector<double> h_end;
  std::vector<double> gh_end;
  std::vector<double> weights;  // normalized to sum 1
  double ess = 0.0;
};

/// Self-normalized importance samples from Q^(N) (same proposal as
/// zn_partition_is). Throws EssError below ess_floor.
QnSampleBatch qn_sample(const ScalingSpec& spec, const XWindow& window,
                        long n_samples, std::uint64_t seed, int workers = 1,
                        double ess_floor = 100.0);

struct PointwiseRow {
  int n_steps = 0;
  double h_discrete = 0.0;   // H^(N) at the grid restriction of g
  double h_limit = 0.0;      // H with the exact integral
  double abs_error = 0.0;
  double max_factor = 0.0;   // max_i |c_{i,N}|
  double sum_gap = 0.0;      // |sum_i c_{i,N} + e^{-2x} int e^{-2g}|
  double abs_sum = 0.0;      // sum_i |c_{i,N}|
  double taylor_tail = 0.0;  // sum log(1 - z_i) + z_i, always <= 0
};

/// H^(N) vs H along an N ladder for a continuous path, plus the three
/// product-convergence conditions checked numerically.
std::vector<PointwiseRow> pointwise_convergence_check(
    const std::function<double(double)>& g, double x, double u, double v,
    double length, std::span<const int> n_ladder);

/// exp(-2ak/sqrt(N)) binom(2N, N+k) / binom(2N, N+k+round(a sqrt(N))) via
/// log-gamma. Domain: |k|, |k + a sqrt(N)| < N^(5/6).
double comb_ratio(double a, long k, long n);

struct CombSup {
  double sup_ratio = 0.0;
  long argmax_k = 0;
  long grid_size = 0;
};

/// Sup of comb_ratio over the admissible grid k = round(c sqrt(N)),
/// c in [-3, 3] (121 points).
CombSup combapprox_sup(double a, long n);

}  // namespace okl

#endif  // OKL_SCALING_HPP
