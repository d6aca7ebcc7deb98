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

#include "okl/bessel.hpp"

#include <cmath>
#include <stdexcept>

#include "okl/common.hpp"

namespace okl {

namespace {

constexpr double kEps = 2.2204460492503131e-16;

// Coefficients of 1/Gamma(1+z) = sum a_k z^k (Abramowitz & Stegun 6.1.34).
constexpr double kInvGammaCoef[] = {
    1.0000000000000000e+00,  5.7721566490153286e-01,  -6.5587807152025388e-01,
    -4.2002635034095236e-02, 1.6653861138229149e-01,  -4.2197734555544337e-02,
    -9.6219715278769736e-03, 7.2189432466630995e-03,  -1.1651675918590651e-03,
    -2.1524167411495097e-04, 1.2805028238811619e-04,  -2.0134854780788239e-05,
    -1.2504934821426707e-06, 1.1330272319816959e-06,  -2.0563384169776071e-07,
    6.1160951044814158e-09,  5.0020076444692229e-09,  -1.1812745704870201e-09,
    1.0434267116911005e-10,  7.7822634399050713e-12,  -3.6968056186422057e-12,
    5.1003702874544760e-13,  -2.0583260535665068e-14, -5.3481225394230180e-15,
    1.2267786282382608e-15,  -1.1812593016974588e-16, 1.1866922547516003e-17,
};

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 = the even part,
// gampl = 1/Gamma(1+mu), gammi = 1/Gamma(1-mu); |mu| <= 1/2. The odd/even
// split of the series keeps gam1 accurate near mu = 0.
void chebyshev_gammas(double mu, double& gam1, double& gam2, double& gampl,
                      double& gammi) {
  const double mu2 = mu * mu;
  double odd = 0.0;   // sum a_{2k+1} mu^{2k}
  double even = 0.0;  // sum a_{2k} mu^{2k}
  double pow_mu2 = 1.0;
  for (std::size_t k = 0; 2 * k + 1 < std::size(kInvGammaCoef); ++k) {
    even += kInvGammaCoef[2 * k] * pow_mu2;
    odd += kInvGammaCoef[2 * k + 1] * pow_mu2;
    pow_mu2 *= mu2;
  }
  gam1 = -odd;
  gam2 = even;
  gampl = even + mu * odd;
  gammi = even - mu * odd;
}

// K_mu and K_{mu+1} for |mu| <= 1/2, 0 < x <= 2 (Temme's series).
void bessel_k_temme(double mu, double x, double& kmu, double& kmup1) {
  const double pimu = M_PI * mu;
  const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
  const double d = -std::log(0.5 * x);
  double e = mu * d;
  const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
  double gam1, gam2, gampl, gammi;
  chebyshev_gammas(mu, gam1, gam2, gampl, gammi);
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  const double d2 = 0.25 * x * x;
  double sum1 = p;
  int i = 1;
  for (; i <= 500; ++i) {
    ff = (i * ff + p + q) / (i * i - mu * mu);
    c *= d2 / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  if (i > 500) throw ConvergenceError("bessel_k series did not converge", sum, sum1);
  kmu = sum;
  kmup1 = sum1 * 2.0 / x;
}

// K_mu and K_{mu+1} for |mu| <= 1/2, x > 2 (Steed's CF2).
void bessel_k_cf2(double mu, double x, double& kmu, double& kmup1) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= 5000; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > 5000) throw ConvergenceError("bessel_k CF2 did not converge", s, h);
  h = a1 * h;
  kmu = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
  kmup1 = kmu * (mu + x + 0.5 - h) / x;
}

}  // namespace

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be positive");
  nu = std::abs(nu);  // K_{-nu} = K_{nu}
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;  // |mu| <= 1/2
  double kmu, kmup1;
  if (x <= 2.0) {
    bessel_k_temme(mu, x, kmu, kmup1);
  } else {
    bessel_k_cf2(mu, x, kmu, kmup1);
  }
  double km = kmu;
  double kp = kmup1;
  for (int l = 1; l <= nl; ++l) {
    const double knew = 2.0 * (mu + l) / x * kp + km;
    km = kp;
    kp = knew;
  }
  return nl == 0 ? kmu : km;
}

MellinCheck bessel_mellin_check(double mu, double nu, double a) {
  nu = std::abs(nu);
  if (!(a > 0.0)) throw std::domain_error("bessel_mellin_check: a must be positive");
  if (!(mu + 1.0 - nu > 0.0)) {
    throw std::domain_error("bessel_mellin_check: need mu + 1 - |nu| > 0");
  }

  // Substitute x = e^s: integral of exp((mu+1) s) K_nu(a e^s) ds over the
  // real line. The integrand decays like exp((mu+1-nu) s) to the left
  // (exp((mu+1) s) (-s) when nu = 0) and double-exponentially to the right;
  // trapezoid sums then converge geometrically under step halving.
  const auto f = [&](double s) -> double {
    const double z = a * std::exp(s);
    if (z > 800.0) return 0.0;
    return std::exp((mu + 1.0) * s) * bessel_k(nu, z);
  };

  const double rate_left = mu + 1.0 - nu;
  // Peak and cutoffs from the decay rates; 1e-22 of the maximum is far
  // below the 1e-8 residual target.
  double s_peak = 0.0;
  double f_peak = 0.0;
  for (double s = -40.0; s <= 10.0; s += 0.5) {
    const double v = f(s);
    if (v > f_peak) {
      f_peak = v;
      s_peak = s;
    }
  }
  if (f_peak <= 0.0) throw std::runtime_error("bessel_mellin_check: empty integrand");
  double s_lo = s_peak - (55.0 / std::min(rate_left, 1.0));
  s_lo = std::max(s_lo, std::log(1e-190) - std::log(a));
  double s_hi = s_peak;
  while (f(s_hi) > f_peak * 1e-22) s_hi += 1.0;

  double h = 0.25;
  auto trapezoid = [&](double step) {
    double acc = 0.5 * (f(s_lo) + f(s_hi));
    const long n = std::lround(std::floor((s_hi - s_lo) / step));
    for (long k = 1; k < n; ++k) acc += f(s_lo + k * step);
    return acc * step;
  };
  double value = trapezoid(h);
  for (int level = 0; level < 8; ++level) {
    h *= 0.5;
    const double next = trapezoid(h);
    const bool done = std::abs(next - value) <= 1e-11 * std::abs(next);
    value = next;
    if (done) break;
  }

  const double closed =
      std::exp((mu - 1.0) * std::log(2.0) - (mu + 1.0) * std::log(a) +
               std::lgamma(0.5 * (1.0 + mu + nu)) +
               std::lgamma(0.5 * (1.0 + mu - nu)));
  MellinCheck out;
  out.quadrature = value;
  out.closed_form = closed;
  out.relative_residual = std::abs(value - closed) / std::abs(closed);
  return out;
}

}  // namespace okl
