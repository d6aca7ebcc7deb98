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

#include <cmath>
#include <stdexcept>
#include <tuple>

#include <doctest.h>

#include "okl/common.hpp"
#include "okl/params.hpp"

using namespace okl;

TEST_CASE("q_bracket: pinned values") {
  CHECK(q_bracket(1, 0.37) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q_bracket(0, 0.37) == 0.0);
  CHECK(q_bracket(3, 0.5) == doctest::Approx(1.75).epsilon(1e-15));
  // negative n takes the formula value
  CHECK(q_bracket(-1, 0.5) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(q_bracket(2, 0.0) == 1.0);
  CHECK_THROWS_AS(q_bracket(3, 1.0), std::domain_error);
  CHECK_THROWS_AS(q_bracket(3, -0.1), std::domain_error);
}

TEST_CASE("q_bracket: strictly increasing in n, and log variant agrees") {
  Rng rng(101);
  for (int rep = 0; rep < 1000; ++rep) {
    const double q = rng.uniform() * 0.999;
    // Strict increase is checkable while q^n stays above double resolution;
    // past that the bracket saturates at its limit 1/(1-q).
    const long n_strict =
        q > 0.0 ? std::min<long>(40, static_cast<long>(-30.0 / std::log(q))) : 1;
    double prev = q_bracket(0, q);
    for (long n = 1; n <= 40; ++n) {
      const double cur = q_bracket(n, q);
      if (n <= n_strict) {
        CHECK(cur > prev);
      } else {
        CHECK(cur >= prev);
      }
      prev = cur;
    }
    const long n = 1 + static_cast<long>(rng.uniform_below(60));
    if (q > 0.0) {
      const double direct = std::log(q_bracket(n, q));
      const double via_log = log_q_bracket(static_cast<double>(n), std::log(q));
      CHECK(via_log == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("kappa_pm: pinned and degenerate cases") {
  const auto [kp0, km0] = kappa_pm(0.0, 1.0, 0.0);
  CHECK(kp0 == 0.0);
  CHECK(km0 == 0.0);

  // roots of 0.5 k^2 - 0.45 k - 0.2, via the quadratic formula directly
  const auto [kp, km] = kappa_pm(0.25, 0.5, 0.2);
  const double disc = std::sqrt(0.45 * 0.45 + 4.0 * 0.5 * 0.2);
  CHECK(kp == doctest::Approx((0.45 + disc) / 1.0).epsilon(1e-14));
  CHECK(km == doctest::Approx((0.45 - disc) / 1.0).epsilon(1e-14));

  CHECK_THROWS_AS(kappa_pm(0.5, 0.0, 0.1), std::domain_error);
}

TEST_CASE("kappa_pm: Vieta relations on random inputs") {
  Rng rng(202);
  for (int rep = 0; rep < 1000; ++rep) {
    const double q = rng.uniform() * 0.999;
    const double x = 1e-3 + 3.0 * rng.uniform();
    const double y = 3.0 * rng.uniform();
    const auto [kp, km] = kappa_pm(q, x, y);
    CHECK(kp >= km);
    const double b = 1.0 - q - x + y;
    CHECK(kp * km == doctest::Approx(-y / x).epsilon(1e-10));
    CHECK(kp + km == doctest::Approx(b / x).epsilon(1e-10));
  }
}

TEST_CASE("scaling_to_asep: pinned q and round trips") {
  const ScalingSpec spec{4, 1.0, 1.0, 1.0};
  const auto scaled = scaling_to_asep(spec);
  CHECK(scaled.asep.q == doctest::Approx(0.36787944117144233).epsilon(1e-15));

  const std::tuple<int, double, double> combos[] = {
      {4, 1.0, 1.0}, {100, 2.0, 0.5}, {1000000, 0.3, 0.4}};
  for (const auto& [n, u, v] : combos) {
    const ScalingSpec s{n, u, v, 1.0};
    const auto out = scaling_to_asep(s);
    const auto [a_rt, bm] = kappa_pm(out.asep.q, out.asep.beta, out.asep.delta);
    const auto [c_rt, dm] = kappa_pm(out.asep.q, out.asep.alpha, out.asep.gamma);
    CHECK(std::abs(a_rt - out.abcd.a_param) <= 1e-12);
    CHECK(std::abs(c_rt - out.abcd.c_param) <= 1e-12);
    // kappa_minus recovers B = D = -q automatically under Liggett's condition
    CHECK(bm == doctest::Approx(-out.asep.q).epsilon(1e-10));
    CHECK(dm == doctest::Approx(-out.asep.q).epsilon(1e-10));
    // Liggett's condition itself
    CHECK(out.asep.alpha + out.asep.gamma / out.asep.q == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.asep.beta + out.asep.delta / out.asep.q == doctest::Approx(1.0).epsilon(1e-12));
    // fan region: A C = q^{u+v} < 1, B = D = -q
    CHECK(out.abcd.a_param * out.abcd.c_param ==
          doctest::Approx(std::exp((u + v) * s.log_q())).epsilon(1e-13));
    CHECK(out.abcd.a_param * out.abcd.c_param < 1.0);
    CHECK(out.abcd.b_param == -out.asep.q);
    CHECK(out.abcd.d_param == -out.asep.q);
  }
}

TEST_CASE("scaling_to_asep: triple point expansion of the densities") {
  for (const double n : {1e2, 1e4, 1e6}) {
    const ScalingSpec s{static_cast<int>(n), 1.0, 1.0, 1.0};
    const auto out = scaling_to_asep(s);
    const double root_n = std::sqrt(n);
    // next term in the expansion of 1/(1+e^{-2u/sqrt(N)}) is u^3/(6 N^{3/2})
    const double u_bound = 2.0 * std::pow(s.u, 3) / (6.0 * std::pow(n, 1.5)) + 1e-15;
    const double v_bound = 2.0 * std::pow(s.v, 3) / (6.0 * std::pow(n, 1.5)) + 1e-15;
    CHECK(std::abs(out.densities.rho_left - 0.5 - s.u / (2.0 * root_n)) <= u_bound);
    CHECK(std::abs(out.densities.rho_right - 0.5 + s.v / (2.0 * root_n)) <= v_bound);
    CHECK(out.densities.rho_left > 0.0);
    CHECK(out.densities.rho_left < 1.0);
    CHECK(out.densities.rho_right > 0.0);
    CHECK(out.densities.rho_right < 1.0);
  }
}

TEST_CASE("scaling_to_asep: fan-region violation rejected") {
  CHECK_THROWS_AS(scaling_to_asep(ScalingSpec{16, 1.0, -1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(scaling_to_asep(ScalingSpec{16, -0.5, 0.5, 1.0}), std::domain_error);
}

TEST_CASE("densities stay in (0,1) for C > 0, A >= 0") {
  // kappa_plus of valid rates is always >= 0, so C >= 0 is the reachable
  // domain; 1/(1+C) leaves (0,1) for C < 0.
  Rng rng(303);
  for (int rep = 0; rep < 1000; ++rep) {
    AbcdParams abcd;
    abcd.a_param = 5.0 * rng.uniform();
    abcd.c_param = 1e-9 + 6.0 * rng.uniform();
    const auto rho = densities_from_abcd(abcd);
    CHECK(rho.rho_left > 0.0);
    CHECK(rho.rho_left < 1.0);
    CHECK(rho.rho_right >= 0.0);
    CHECK(rho.rho_right < 1.0);
  }
}

TEST_CASE("AsepParams validation") {
  AsepParams p{0.5, 0.5, 0.1, 0.1, 0.3, 4};
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  p.delta = 0.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);  // nothing can enter
  p = AsepParams{0.5, 0.0, 0.0, 0.1, 0.3, 4};
  CHECK_THROWS_AS(p.validate(), std::domain_error);  // nothing can exit
  p = AsepParams{0.5, 0.5, 0.1, 0.1, 1.0, 4};
  CHECK_THROWS_AS(p.validate(), std::domain_error);  // q out of range
}
