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

// Acceptance suite: one line per criterion, exit code = number of failed
// criteria; `okl_acceptance k` runs criterion k alone. The final-gap and
// top-rung sub-checks of criteria 3 and 4 read FAIL on purpose: both
// quantities have measured floors ~0.43/sqrt(N) at the top rung N = 64
// (see README), above the 5% / 0.05 thresholds.

#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "okl/asep.hpp"
#include "okl/common.hpp"
#include "okl/experiments.hpp"
#include "okl/kpz.hpp"
#include "okl/mpa.hpp"
#include "okl/params.hpp"
#include "okl/rw_stationary.hpp"
#include "okl/scaling.hpp"
#include "okl/stats.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct SubCheck {
  std::string name;
  bool pass;
  double value;
  double tolerance;
};

struct CriterionRun {
  std::string title;
  double limit_seconds;
  std::vector<SubCheck> checks;
  double elapsed = 0.0;

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return elapsed < limit_seconds;
  }
};

void absorb_experiment(CriterionRun& run, const okl::ExperimentResult& result,
                       const std::string& prefix) {
  for (const auto& c : result.criteria) {
    run.checks.push_back({prefix + c.name, c.pass, c.value, c.tolerance});
  }
}

void print_run(const CriterionRun& run) {
  std::printf("[%s] %s (%.1f s, limit %.0f s)\n", run.pass() ? "PASS" : "FAIL",
              run.title.c_str(), run.elapsed, run.limit_seconds);
  for (const auto& c : run.checks) {
    std::printf("    [%s] %-38s value=%-14.6g tolerance=%.6g\n",
                c.pass ? "ok" : "XX", c.name.c_str(), c.value, c.tolerance);
  }
}

// --- criterion 1: the three-way construction identity --------------------

CriterionRun criterion1() {
  CriterionRun run{"criterion-1 stationary-law identity (walk = generator = MPA)", 120.0, {}};
  const auto t0 = Clock::now();
  const std::vector<std::pair<double, double>> uv = {{1.0, 1.0}, {2.0, 0.5}, {0.3, 0.4}};
  for (const auto& [u, v] : uv) {
    okl::ExperimentConfig cfg;
    cfg.experiment = "triple-check";
    cfg.u = u;
    cfg.v = v;
    cfg.n_ladder = {2, 3, 4, 5, 6, 7};
    const auto res = okl::run_experiment(cfg);
    char tag[64];
    std::snprintf(tag, sizeof tag, "(u=%g,v=%g) ", u, v);
    absorb_experiment(run, res, tag);
  }
  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

// --- criterion 2: pointwise convergence of the discrete weights ----------

CriterionRun criterion2() {
  CriterionRun run{"criterion-2 pointwise convergence of the product weights", 60.0, {}};
  const auto t0 = Clock::now();
  okl::ExperimentConfig cfg;
  cfg.experiment = "pointwise";
  const auto res = okl::run_experiment(cfg);
  absorb_experiment(run, res, "");
  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

// --- criterion 3: partition function ladder ------------------------------

CriterionRun criterion3() {
  CriterionRun run{"criterion-3 partition functions bounded and converging", 600.0, {}};
  const auto t0 = Clock::now();
  okl::ExperimentConfig cfg;
  cfg.experiment = "zn-convergence";
  cfg.n_samples = 400000;
  cfg.continuum_samples = 400000;
  cfg.grid_points = 256;
  cfg.seed = 20260808;
  const auto res = okl::run_experiment(cfg);
  absorb_experiment(run, res, "");
  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

// --- criterion 4: weak convergence of the endpoint law -------------------

CriterionRun criterion4() {
  CriterionRun run{"criterion-4 weak convergence of g(L)+h(L)", 900.0, {}};
  const auto t0 = Clock::now();
  okl::ExperimentConfig cfg;
  cfg.experiment = "weak-convergence";
  cfg.n_samples = 400000;
  cfg.continuum_samples = 100000;
  cfg.grid_points = 512;
  cfg.seed = 31337;
  const auto res = okl::run_experiment(cfg);
  absorb_experiment(run, res, "");
  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

// --- criterion 5: continuum partition function finite, Mellin identity ---

CriterionRun criterion5() {
  CriterionRun run{"criterion-5 continuum partition finite + Mellin identity", 300.0, {}};
  const auto t0 = Clock::now();
  const std::vector<std::pair<double, double>> uv = {
      {0.5, 0.5}, {1.0, 1.0}, {1.5, -0.5}, {0.2, 0.1}};
  for (const auto& [u, v] : uv) {
    bool finite = false;
    double value = 0.0;
    try {
      const auto z = okl::z_continuum(u, v, 1.0, 120000, 5150,
                                      okl::BrownianPathSpec{256, 1.0});
      value = z.value;
      finite = std::isfinite(z.value) && z.value > 0.0;
    } catch (const std::exception&) {
      finite = false;
    }
    char tag[80];
    std::snprintf(tag, sizeof tag, "z-finite-stable (u=%g,v=%g)", u, v);
    run.checks.push_back({tag, finite, value, 0.0});
  }
  okl::ExperimentConfig cfg;
  cfg.experiment = "bessel";
  const auto res = okl::run_experiment(cfg);
  absorb_experiment(run, res, "");
  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

// --- criterion 6: tilted binomial ratios ---------------------------------

CriterionRun criterion6() {
  CriterionRun run{"criterion-6 tilted binomial ratios finite and settling", 120.0, {}};
  const auto t0 = Clock::now();
  okl::ExperimentConfig cfg;
  cfg.experiment = "bounds";
  cfg.continuum_samples = 30000;
  cfg.grid_points = 256;
  const auto res = okl::run_experiment(cfg);
  absorb_experiment(run, res, "");
  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

// --- criterion 7: invariant suites ----------------------------------------

CriterionRun criterion7() {
  CriterionRun run{"criterion-7 invariant and property suites", 300.0, {}};
  const auto t0 = Clock::now();

  {  // DEHP relation residuals at M = 40
    double worst = 0.0;
    for (const int n : {9, 25}) {
      const auto scaled = okl::scaling_to_asep(okl::ScalingSpec{n, 1.0, 1.0, 1.0});
      const auto rep = okl::build_rep(scaled.abcd, scaled.asep.q, 40);
      const auto res = okl::check_dehp_relations(rep, scaled.asep);
      worst = std::max({worst, res.bulk, res.left_vec, res.right_vec});
    }
    run.checks.push_back({"dehp-interior-residuals", worst <= 1e-10, worst, 1e-10});
  }

  {  // h-marginal invariance under the reweighting, exact DP at N = 6
    const okl::ScalingSpec spec{6, 1.0, 1.0, 1.0};
    const auto marg = okl::qn_exact_marginals(spec, okl::sound_x_window(spec));
    run.checks.push_back({"h-marginal-invariance", marg.h_conditional_tv <= 1e-12,
                          marg.h_conditional_tv, 1e-12});
  }

  {  // Gillespie vs exact at N = 4, about 1e6 events, 5 MC standard errors
    const auto scaled = okl::scaling_to_asep(okl::ScalingSpec{4, 1.0, 1.0, 1.0});
    const auto pi = okl::generator_stationary(scaled.asep);
    const double t_end = 570000.0;  // ~1.05e6 events at these rates
    const auto sim = okl::gillespie_simulate(scaled.asep, t_end, 97531);
    const double t0w = 1000.0;
    const int n_batches = 32;
    const double width = (t_end - t0w) / n_batches;
    std::vector<std::vector<double>> occ(n_batches, std::vector<double>(16, 0.0));
    for (std::size_t i = 0; i < sim.trajectory.size(); ++i) {
      const double seg_begin = std::max(sim.trajectory[i].time, t0w);
      const double seg_end =
          (i + 1 < sim.trajectory.size()) ? sim.trajectory[i + 1].time : t_end;
      if (seg_end <= seg_begin) continue;
      const int b_lo = static_cast<int>((seg_begin - t0w) / width);
      const int b_hi = static_cast<int>((seg_end - t0w) / width);
      for (int b = std::max(0, b_lo); b <= std::min(n_batches - 1, b_hi); ++b) {
        const double lo = t0w + b * width;
        const double overlap =
            std::min(seg_end, lo + width) - std::max(seg_begin, lo);
        if (overlap > 0.0) occ[b][sim.trajectory[i].state] += overlap;
      }
    }
    double tv = 0.0;
    double se_sum = 0.0;
    for (std::uint64_t s = 0; s < 16; ++s) {
      double mean = 0.0;
      for (int b = 0; b < n_batches; ++b) mean += occ[b][s] / width;
      mean /= n_batches;
      double var = 0.0;
      for (int b = 0; b < n_batches; ++b) {
        const double d = occ[b][s] / width - mean;
        var += d * d;
      }
      var /= (n_batches - 1);
      se_sum += std::sqrt(var / n_batches);
      tv += std::abs(mean - pi.prob(s));
    }
    tv *= 0.5;
    se_sum *= 0.5;
    run.checks.push_back({"gillespie-vs-exact-tv", tv <= 5.0 * se_sum, tv, 5.0 * se_sum});
    run.checks.push_back({"gillespie-event-count",
                          sim.trajectory.size() >= 1000000,
                          static_cast<double>(sim.trajectory.size()), 1e6});
  }

  {  // Vieta property, 1000 randomized cases
    okl::Rng rng(1111);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      const double q = rng.uniform() * 0.999;
      const double x = 1e-3 + 3.0 * rng.uniform();
      const double y = 3.0 * rng.uniform();
      const auto [kp, km] = okl::kappa_pm(q, x, y);
      worst = std::max(worst, std::abs(kp * km + y / x) / std::max(1.0, y / x));
      worst = std::max(worst,
                       std::abs(kp + km - (1.0 - q - x + y) / x) /
                           std::max(1.0, std::abs((1.0 - q - x + y) / x)));
    }
    run.checks.push_back({"vieta-property-1000", worst <= 1e-10, worst, 1e-10});
  }

  {  // q-bracket monotonicity, 1000 randomized cases
    okl::Rng rng(2222);
    bool ok = true;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
      const double q = rng.uniform() * 0.999;
      const long n_strict =
          q > 0.0 ? std::min<long>(30, static_cast<long>(-30.0 / std::log(q))) : 1;
      double prev = okl::q_bracket(0, q);
      for (long n = 1; n <= n_strict; ++n) {
        const double cur = okl::q_bracket(n, q);
        if (!(cur > prev)) ok = false;
        prev = cur;
      }
    }
    run.checks.push_back({"q-bracket-monotone-1000", ok, ok ? 1.0 : 0.0, 1.0});
  }

  {  // support rule, 1000 randomized paths
    okl::Rng rng(3333);
    const okl::AbcdParams abcd{0.5, -0.4, 0.6, -0.4};
    bool ok = true;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
      const int n = 1 + static_cast<int>(rng.uniform_below(8));
      okl::LatticePath2D path;
      path.offset_r = 1 + static_cast<int>(rng.uniform_below(4));
      path.n_path.assign(n + 1, 0);
      path.m_path.assign(n + 1, 0);
      int lowest = path.offset_r;
      for (int i = 1; i <= n; ++i) {
        const auto move = rng.uniform_below(4);
        path.n_path[i] = path.n_path[i - 1] + (move == 0) - (move == 1);
        path.m_path[i] = path.m_path[i - 1] + (move == 2) - (move == 3);
        lowest = std::min(lowest, path.n_path[i] + path.offset_r);
      }
      const auto w = okl::rw_weight(path, abcd, 0.35);
      if (w.in_support != (lowest >= 1)) ok = false;
      if (!w.in_support && w.log_weight != okl::kNegInf) ok = false;
    }
    run.checks.push_back({"support-rule-1000", ok, ok ? 1.0 : 0.0, 1.0});
  }

  {  // recentering identity between the two Radon-Nikodym forms
    okl::Rng rng(4444);
    double worst = 0.0;
    int in_support = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      const int n = 2 + static_cast<int>(rng.uniform_below(9));
      const okl::ScalingSpec spec{n, 0.2 + rng.uniform(), 0.2 + rng.uniform(), 1.0};
      const double step = 1.0 / std::sqrt(static_cast<double>(n));
      okl::RescaledPath path;
      path.x = (1 + static_cast<long>(rng.uniform_below(10))) * step -
               0.5 * std::log(static_cast<double>(n));
      path.g.assign(n + 1, 0.0);
      path.h.assign(n + 1, 0.0);
      for (int i = 1; i <= n; ++i) {
        const auto move = rng.uniform_below(4);
        path.g[i] = path.g[i - 1] + (move == 0 ? step : move == 1 ? -step : 0.0);
        path.h[i] = path.h[i - 1] + (move == 2 ? step : move == 3 ? -step : 0.0);
      }
      const auto h_eval = okl::rn_h(path, spec);
      okl::RescaledPath shifted = path;
      shifted.x = path.x + 0.5 * std::log(static_cast<double>(n));
      const auto r_eval = okl::rn_r(shifted, spec);
      if (h_eval.in_support != r_eval.in_support) {
        worst = 1.0;
        continue;
      }
      if (!h_eval.in_support) continue;
      ++in_support;
      const double want =
          r_eval.log_value + (spec.u + spec.v) * std::log(static_cast<double>(n)) +
          (n + 1) * std::log(-std::expm1(spec.log_q()));
      worst = std::max(worst, std::abs(h_eval.log_value - want) /
                                  std::max(1.0, std::abs(want)));
    }
    run.checks.push_back({"recentering-identity-1000", worst <= 1e-10 && in_support > 400,
                          worst, 1e-10});
  }

  run.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  using Criterion = CriterionRun (*)();
  const std::vector<Criterion> all = {criterion1, criterion2, criterion3,
                                      criterion4, criterion5, criterion6,
                                      criterion7};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(all.size())) {
      std::fprintf(stderr, "usage: okl_acceptance [criterion 1..7]...\n");
      return 64;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(all.size()); ++k) selected.push_back(k);
  }

  int failures = 0;
  for (int k : selected) {
    const auto run = all[k - 1]();
    print_run(run);
    if (!run.pass()) ++failures;
  }
  std::printf("\nacceptance: %d/%zu criteria passed\n",
              static_cast<int>(selected.size()) - failures, selected.size());
  return failures;
}
