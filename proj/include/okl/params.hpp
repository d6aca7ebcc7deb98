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

#ifndef OKL_PARAMS_HPP
#define OKL_PARAMS_HPP

#include <cmath>
#include <utility>

namespace okl {

/// Open ASEP rates: alpha/gamma at the left reservoir, beta/delta at the
/// right, bulk jump rates 1 (right) and q (left), on n_sites sites.
struct AsepParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double q = 0.0;
  int n_sites = 1;

  /// Throws std::domain_error unless the chain is irreducible on {0,1}^N:
  /// rates nonnegative, q in [0,1), a particle can enter and exit.
  void validate() const;
};

/// The (A, B, C, D) reparameterization via the kappa maps.
struct AbcdParams {
  double a_param = 0.0;
  double b_param = 0.0;
  double c_param = 0.0;
  double d_param = 0.0;
};

struct BoundaryDensities {
  double rho_left = 0.5;
  double rho_right = 0.5;
};

/// Weak-asymmetry scaling input: N lattice steps, Neumann parameters (u, v)
/// with u + v > 0 (fan region), interval length L.
struct ScalingSpec {
  int n_steps = 4;
  double u = 1.0;
  double v = 1.0;
  double length = 1.0;

  void validate() const;
  /// log q = -2/sqrt(N), held exactly; all powers of q go through this.
  double log_q() const { return -2.0 / std::sqrt(static_cast<double>(n_steps)); }
  double q() const { return std::exp(log_q()); }
};

/// q-deformed integer [n]_q = (1 - q^n)/(1 - q), stable near q = 1.
/// Negative n is allowed (the formula value); q outside [0,1) throws.
double q_bracket(long n, double q);

/// log [n]_q for real n > 0 and log_q <= 0 (log_q = -inf means q = 0).
double log_q_bracket(double n, double log_q);

/// The two roots of x k^2 - (1-q-x+y) k - y = 0, largest first.
/// Requires x > 0, y >= 0.
std::pair<double, double> kappa_pm(double q, double x, double y);

BoundaryDensities densities_from_abcd(const AbcdParams& abcd);

struct ScaledAsep {
  AsepParams asep;
  AbcdParams abcd;
  BoundaryDensities densities;
};

/// Realizes the scaling: q = exp(-2/sqrt(N)), A = q^v, B = -q, C = q^u,
/// D = -q; rates recovered under Liggett's condition (alpha + gamma/q = 1,
/// beta + delta/q = 1) by bisection.
ScaledAsep scaling_to_asep(const ScalingSpec& spec);

}  // namespace okl

#endif  // OKL_PARAMS_HPP
