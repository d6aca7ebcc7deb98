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

#include "okl/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "okl/common.hpp"

namespace okl {

void AsepParams::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0 && delta >= 0.0)) {
    throw std::domain_error("AsepParams: rates must be nonnegative");
  }
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::domain_error("AsepParams: q must lie in [0, 1)");
  }
  if (n_sites < 1) throw std::domain_error("AsepParams: n_sites must be positive");
  if (!(alpha > 0.0 || delta > 0.0)) {
    throw std::domain_error("AsepParams: no particle can enter (alpha = delta = 0)");
  }
  if (!(beta > 0.0 || gamma > 0.0)) {
    throw std::domain_error("AsepParams: no particle can exit (beta = gamma = 0)");
  }
}

void ScalingSpec::validate() const {
  if (n_steps < 1) throw std::domain_error("ScalingSpec: n_steps must be positive");
  if (!(length > 0.0)) throw std::domain_error("ScalingSpec: length must be positive");
  if (!(u + v > 0.0)) {
    throw std::domain_error("ScalingSpec: fan region requires u + v > 0");
  }
}

double q_bracket(long n, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("q_bracket: q must lie in [0, 1)");
  if (n == 0) return 0.0;
  if (q == 0.0) {
    if (n > 0) return 1.0;
    return -std::numeric_limits<double>::infinity();
  }
  const double lq = std::log(q);
  return std::expm1(static_cast<double>(n) * lq) / std::expm1(lq);
}

double log_q_bracket(double n, double log_q) {
  // q = 0: every bracket with n >= 1 is 1.
  if (log_q == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::log(-std::expm1(n * log_q)) - std::log(-std::expm1(log_q));
}

std::pair<double, double> kappa_pm(double q, double x, double y) {
  if (!(x > 0.0)) throw std::domain_error("kappa_pm: x must be positive");
  if (!(y >= 0.0)) throw std::domain_error("kappa_pm: y must be nonnegative");
  const double b = 1.0 - q - x + y;
  const double disc = std::sqrt(b * b + 4.0 * x * y);
  if (y == 0.0) {
    // Roots are 0 and b/x.
    const double other = b / x;
    return other >= 0.0 ? std::make_pair(other, 0.0) : std::make_pair(0.0, other);
  }
  // Evaluate the root that avoids cancellation; recover the other via
  // kappa_plus * kappa_minus = -y/x.
  if (b >= 0.0) {
    const double kp = (b + disc) / (2.0 * x);
    return {kp, -y / (x * kp)};
  }
  const double km = (b - disc) / (2.0 * x);
  return {-y / (x * km), km};
}

BoundaryDensities densities_from_abcd(const AbcdParams& abcd) {
  return {1.0 / (1.0 + abcd.c_param), abcd.a_param / (1.0 + abcd.a_param)};
}

namespace {

// Under Liggett's condition gamma = q (1 - alpha), so kappa_plus(q, alpha,
// gamma) is decreasing in alpha from +inf to 0 on (0, 1]; bisection for the
// rate whose kappa_plus hits `target`.
double invert_kappa_liggett(double q, double target) {
  auto f = [&](double rate) {
    return kappa_pm(q, rate, q * (1.0 - rate)).first - target;
  };
  double lo = 1e-14;
  double hi = 1.0;
  if (!(f(lo) > 0.0) || !(f(hi) < 0.0)) {
    throw std::domain_error("scaling_to_asep: kappa inversion lost its bracket");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ScaledAsep scaling_to_asep(const ScalingSpec& spec) {
  spec.validate();
  const double lq = spec.log_q();
  const double q = std::exp(lq);
  AbcdParams abcd;
  abcd.a_param = std::exp(spec.v * lq);
  abcd.b_param = -q;
  abcd.c_param = std::exp(spec.u * lq);
  abcd.d_param = -q;

  AsepParams asep;
  asep.q = q;
  asep.n_sites = spec.n_steps;
  asep.alpha = invert_kappa_liggett(q, abcd.c_param);
  asep.gamma = q * (1.0 - asep.alpha);
  asep.beta = invert_kappa_liggett(q, abcd.a_param);
  asep.delta = q * (1.0 - asep.beta);
  asep.validate();

  const double c_check = kappa_pm(q, asep.alpha, asep.gamma).first;
  const double a_check = kappa_pm(q, asep.beta, asep.delta).first;
  if (std::abs(c_check - abcd.c_param) > 1e-12 * std::max(1.0, abcd.c_param) ||
      std::abs(a_check - abcd.a_param) > 1e-12 * std::max(1.0, abcd.a_param)) {
    throw std::runtime_error("scaling_to_asep: kappa round trip exceeded 1e-12");
  }

  return {asep, abcd, densities_from_abcd(abcd)};
}

}  // namespace okl
