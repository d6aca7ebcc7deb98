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

#ifndef OKL_KPZ_HPP
#define OKL_KPZ_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "okl/stats.hpp"

namespace okl {

// Continuum side: the weight H(x, g, h) against a pair of independent
// Brownian motions with diffusion coefficient 1/sqrt(2) per component
// (variance t/2), plus Monte Carlo machinery for the partition function
// and the reweighted measure.

struct BrownianPathSpec {
  int n_grid = 256;      // M grid cells; paths carry M+1 points
  double length = 1.0;   // interval [0, L]
};

/// log H(x, g, .) = -2(u+v)x - 2v g(L) - e^{-2x} R(g), with R the
/// left-endpoint Riemann sum of int_0^L e^{-2 g(t)} dt on the grid.
double kpz_log_weight(double x, std::span<const double> g, double length,
                      double u, double v);

struct ZEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  long n_paths = 0;
};

/// Z = E_{Lebesgue x Wiener}[H]: Monte Carlo over Brownian paths crossed
/// with a trapezoid x-integral. The window is widened (same paths) until
/// a further widening moves the estimate by <= 1e-8 relative. Throws
/// DivergenceError if that never settles, EssError never (plain MC).
ZEstimate z_continuum(double u, double v, double length, long n_paths,
                      std::uint64_t seed, const BrownianPathSpec& grid = {},
                      int workers = 1);

struct KpzSampleBatch {
  std::vector<double> x;
  std::vector<double> g_end;
  std::vector<double> h_end;
  std::vector<double> gh_end;
  std::vector<double> gh_mid;   // profile functional g(L/2) + h(L/2)
  std::vector<double> weights;  // normalized to sum 1
  double ess = 0.0;
};

/// Self-normalized importance sampler for the reweighted measure:
/// x from the density proportional to exp(-2(u+v)x) truncated to the
/// window (inverse CDF), paths from the Wiener measure, weight
/// H / proposal. Throws EssError below ess_floor.
KpzSampleBatch kpz_q_sample(double u, double v, double length, long n_samples,
                            std::uint64_t seed, const BrownianPathSpec& grid = {},
                            int workers = 1, double ess_floor = 100.0);

struct EnvelopeRatio {
  double x = 0.0;
  double ratio = 0.0;  // E[H(x,.)] e^{2(u+v)x} / K_0(sqrt(2) e^{-x})
};

/// The Bessel-envelope ratio on an x grid (meaningful for v >= 0).
std::vector<EnvelopeRatio> kpz_envelope_ratios(double u, double v, double length,
                                               long n_paths, std::uint64_t seed,
                                               std::span<const double> xs,
                                               const BrownianPathSpec& grid = {});

}  // namespace okl

#endif  // OKL_KPZ_HPP
