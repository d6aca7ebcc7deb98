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

#ifndef OKL_BESSEL_HPP
#define OKL_BESSEL_HPP

namespace okl {

/// Modified Bessel function of the second kind K_nu(x) for real order and
/// x > 0. Temme's series below x = 2, Steed's continued fraction above,
/// with upward recurrence in the order. K_{-nu} = K_{nu}.
double bessel_k(double nu, double x);

struct MellinCheck {
  double quadrature;
  double closed_form;
  double relative_residual;
};

/// Compares the quadrature of int_0^inf x^mu K_nu(a x) dx against
/// 2^(mu-1) a^(-mu-1) Gamma((1+mu+nu)/2) Gamma((1+mu-nu)/2).
/// Requires mu + 1 - |nu| > 0 and a > 0.
MellinCheck bessel_mellin_check(double mu, double nu, double a);

}  // namespace okl

#endif  // OKL_BESSEL_HPP
