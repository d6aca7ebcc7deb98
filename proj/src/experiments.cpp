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

#include "okl/experiments.hpp"

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "okl/asep.hpp"
#include "okl/bessel.hpp"
#include "okl/common.hpp"
#include "okl/kpz.hpp"
#include "okl/mpa.hpp"
#include "okl/params.hpp"
#include "okl/rw_stationary.hpp"
#include "okl/scaling.hpp"
#include "okl/stats.hpp"

namespace okl {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_long(long x) { return std::to_string(x); }

const std::vector<std::string> kExperiments = {
    "triple-check", "pointwise", "zn-convergence",
    "weak-convergence", "bounds", "bessel"};

std::vector<int> default_ladder(const std::string& experiment) {
  if (experiment == "triple-check") return {2, 3, 4, 5, 6, 7};
  if (experiment == "pointwise") {
    return {16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384};
  }
  if (experiment == "zn-convergence") return {4, 8, 12, 16, 32, 64};
  if (experiment == "weak-convergence") return {8, 12, 32, 64};
  if (experiment == "bounds") return {100, 1000, 10000};
  return {};
}

std::map<std::string, double> default_tolerances(const std::string& experiment) {
  if (experiment == "triple-check") {
    return {{"tv", 1e-9}, {"mpa", 1e-8}};
  }
  if (experiment == "pointwise") {
    return {{"halving_band", 0.1}, {"sum_gap", 1e-3}, {"abs_sum_cap", 10.0},
            {"taylor_sign", 1e-15}};
  }
  if (experiment == "zn-convergence") {
    return {{"ess_floor", 1e3}, {"bound_factor", 2.0}, {"trend_slack", 0.1},
            {"final_gap", 0.05}};
  }
  if (experiment == "weak-convergence") {
    return {{"ess_floor", 1e3}, {"trend_slack", 0.1}, {"ks_top", 0.05}};
  }
  if (experiment == "bounds") {
    return {{"envelope_cap", 1e4}, {"comb_fitted", 2.5}, {"comb_settle", 1.02},
            {"bigint", 1e-10}};
  }
  if (experiment == "bessel") {
    return {{"residual", 1e-8}};
  }
  return {};
}

double tol(const ExperimentConfig& cfg, const std::string& key) {
  const auto it = cfg.tolerances.find(key);
  if (it != cfg.tolerances.end()) return it->second;
  const auto defaults = default_tolerances(cfg.experiment);
  const auto dit = defaults.find(key);
  if (dit == defaults.end()) throw std::logic_error("unknown tolerance key: " + key);
  return dit->second;
}

// --- experiment bodies ------------------------------------------------

void run_triple_check(const ExperimentConfig& cfg, ExperimentResult& out) {
  out.csv_lines.push_back("n,u,v,tv_rw_vs_generator,mpa_max_abs_diff");
  double worst_tv = 0.0;
  double worst_mpa = 0.0;
  for (int n : cfg.n_ladder) {
    const ScalingSpec spec{n, cfg.u, cfg.v, cfg.length};
    const auto scaled = scaling_to_asep(spec);
    const auto pi = generator_stationary(scaled.asep);
    const auto asep_law = height_increment_law(pi);
    const auto rw_law = rw_increment_law(scaled.abcd, scaled.asep.q, n);
    const double tv = total_variation(rw_law, asep_law);
    worst_tv = std::max(worst_tv, tv);

    double mpa_diff = 0.0;
    if (scaled.abcd.a_param < 1.0 && scaled.abcd.c_param < 1.0) {
      const auto mpa_law = mpa_state_law(scaled.abcd, scaled.asep.q, n);
      for (const auto& [state, p] : pi.atoms) {
        mpa_diff = std::max(mpa_diff, std::abs(mpa_law.prob(state) - p));
      }
    }
    worst_mpa = std::max(worst_mpa, mpa_diff);
    out.csv_lines.push_back(fmt_long(n) + "," + fmt(cfg.u) + "," + fmt(cfg.v) +
                            "," + fmt(tv) + "," + fmt(mpa_diff));
  }
  out.criteria.push_back({"walk-vs-generator-law-tv", worst_tv, tol(cfg, "tv"),
                          worst_tv <= tol(cfg, "tv"), "max over ladder"});
  out.criteria.push_back({"mpa-vs-generator", worst_mpa, tol(cfg, "mpa"),
                          worst_mpa <= tol(cfg, "mpa"), "max abs over states"});
}

void run_pointwise(const ExperimentConfig& cfg, ExperimentResult& out) {
  struct PathCase {
    std::string name;
    double x;
    std::function<double(double)> g;
  };
  const std::vector<PathCase> cases = {
      {"const0", 0.0, [](double) { return 0.0; }},
      {"sin2pi", 0.3, [](double t) { return std::sin(2.0 * M_PI * t); }},
      {"ramp", -0.2, [](double t) { return 0.5 * t + 0.3 * std::sin(2.0 * t); }},
  };
  out.csv_lines.push_back(
      "path,x,n,h_discrete,h_limit,abs_error,max_factor,sum_gap,abs_sum,taylor_tail");

  double halving_dev = 0.0;
  double smooth_ratio_max = 0.0;
  double factor_ratio_max = 0.0;
  double final_gap_rel = 0.0;
  double abs_sum_sup = 0.0;
  double taylor_max = -1.0;
  for (const auto& pc : cases) {
    const auto rows = pointwise_convergence_check(pc.g, pc.x, cfg.u, cfg.v,
                                                  cfg.length, cfg.n_ladder);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out.csv_lines.push_back(pc.name + "," + fmt(pc.x) + "," + fmt_long(r.n_steps) +
                              "," + fmt(r.h_discrete) + "," + fmt(r.h_limit) + "," +
                              fmt(r.abs_error) + "," + fmt(r.max_factor) + "," +
                              fmt(r.sum_gap) + "," + fmt(r.abs_sum) + "," +
                              fmt(r.taylor_tail));
      abs_sum_sup = std::max(abs_sum_sup, r.abs_sum);
      taylor_max = std::max(taylor_max, r.taylor_tail);
      if (i > 0) {
        const double ratio = r.abs_error / rows[i - 1].abs_error;
        if (pc.name == "const0") {
          halving_dev = std::max(halving_dev, std::abs(ratio - 0.5));
        } else {
          smooth_ratio_max = std::max(smooth_ratio_max, ratio);
        }
        factor_ratio_max = std::max(factor_ratio_max, r.max_factor / rows[i - 1].max_factor);
      }
      if (i + 1 == rows.size()) {
        const double limit_sum = r.abs_sum - r.sum_gap;  // ~ e^{-2x} int e^{-2g}
        final_gap_rel = std::max(final_gap_rel, r.sum_gap / std::max(limit_sum, 1e-12));
      }
    }
  }
  out.criteria.push_back({"const-error-halves", halving_dev, tol(cfg, "halving_band"),
                          halving_dev <= tol(cfg, "halving_band"),
                          "max |ratio - 1/2| per doubling"});
  out.criteria.push_back({"smooth-error-decreasing", smooth_ratio_max, 1.0,
                          smooth_ratio_max < 1.0, "max step ratio"});
  out.criteria.push_back({"durrett-max-factor-vanishes", factor_ratio_max, 0.75,
                          factor_ratio_max <= 0.75, "max |c| ratio per doubling"});
  out.criteria.push_back({"durrett-sum-converges", final_gap_rel, tol(cfg, "sum_gap"),
                          final_gap_rel <= tol(cfg, "sum_gap"),
                          "final relative Riemann gap"});
  out.criteria.push_back({"durrett-abs-sum-bounded", abs_sum_sup, tol(cfg, "abs_sum_cap"),
                          abs_sum_sup <= tol(cfg, "abs_sum_cap"), "sup over ladder"});
  out.criteria.push_back({"taylor-tail-nonpositive", taylor_max, tol(cfg, "taylor_sign"),
                          taylor_max <= tol(cfg, "taylor_sign"), "max over rows"});
}

void run_zn_convergence(const ExperimentConfig& cfg, ExperimentResult& out) {
  out.csv_lines.push_back("n,method,value,std_error,ess,rel_gap_to_continuum");
  const auto zc = z_continuum(cfg.u, cfg.v, cfg.length, cfg.continuum_samples,
                              mix_seed(cfg.seed, 0xC0117),
                              BrownianPathSpec{cfg.grid_points, cfg.length},
                              cfg.workers);
  std::vector<double> gaps;
  double min_ess = 1e300;
  double max_value = 0.0;
  for (int n : cfg.n_ladder) {
    const ScalingSpec spec{n, cfg.u, cfg.v, cfg.length};
    const auto window = sound_x_window(spec);
    double value, se = 0.0, ess_val = 0.0;
    std::string method;
    if (n <= kMaxExactDpSteps) {
      value = zn_partition_exact(spec, window);
      method = "exact";
    } else {
      const auto est = zn_partition_is(spec, window, cfg.n_samples,
                                       mix_seed(cfg.seed, n), cfg.workers);
      value = est.value;
      se = est.std_error;
      ess_val = est.ess;
      min_ess = std::min(min_ess, est.ess);
      method = "is";
    }
    const double gap = std::abs(value - zc.value) / zc.value;
    gaps.push_back(gap);
    max_value = std::max(max_value, value);
    out.csv_lines.push_back(fmt_long(n) + "," + method + "," + fmt(value) + "," +
                            fmt(se) + "," + fmt(ess_val) + "," + fmt(gap));
  }
  out.csv_lines.push_back("continuum,mc," + fmt(zc.value) + "," + fmt(zc.std_error) +
                          ",0,0");

  out.criteria.push_back({"is-ess-floor", min_ess, tol(cfg, "ess_floor"),
                          min_ess >= tol(cfg, "ess_floor"), "min over IS rungs"});
  out.criteria.push_back({"zn-bounded", max_value, tol(cfg, "bound_factor") * zc.value,
                          max_value <= tol(cfg, "bound_factor") * zc.value,
                          "global-constant bound, reference 2 Z"});
  const auto trend = trend_report(gaps, tol(cfg, "trend_slack"));
  out.criteria.push_back({"gap-decreasing", trend.max_step_ratio,
                          1.0 + tol(cfg, "trend_slack"), trend.decreasing,
                          "max gap step ratio"});
  out.criteria.push_back({"final-gap", gaps.back(), tol(cfg, "final_gap"),
                          gaps.back() < tol(cfg, "final_gap"),
                          "top rung vs continuum"});
}

void run_weak_convergence(const ExperimentConfig& cfg, ExperimentResult& out) {
  out.csv_lines.push_back("n,method,ks,ess");
  const auto cont = kpz_q_sample(cfg.u, cfg.v, cfg.length, cfg.continuum_samples,
                                 mix_seed(cfg.seed, 0xC0),
                                 BrownianPathSpec{cfg.grid_points, cfg.length},
                                 cfg.workers);
  const WeightedSample cont_sample{cont.gh_end, cont.weights};
  std::vector<double> ks_ladder;
  double min_ess = cont.ess;
  for (int n : cfg.n_ladder) {
    const ScalingSpec spec{n, cfg.u, cfg.v, cfg.length};
    const auto window = sound_x_window(spec);
    double ks, ess_val = 0.0;
    std::string method;
    if (n <= kMaxExactDpSteps) {
      const auto marg = qn_exact_marginals(spec, window);
      ks = ks_distance(marg.gh_end_law, cont_sample);
      method = "exact";
    } else {
      const auto batch = qn_sample(spec, window, cfg.n_samples,
                                   mix_seed(cfg.seed, 7700 + n), cfg.workers);
      ks = ks_distance(WeightedSample{batch.gh_end, batch.weights}, cont_sample);
      ess_val = batch.ess;
      min_ess = std::min(min_ess, batch.ess);
      method = "is";
    }
    ks_ladder.push_back(ks);
    out.csv_lines.push_back(fmt_long(n) + "," + method + "," + fmt(ks) + "," +
                            fmt(ess_val));
  }
  out.csv_lines.push_back("continuum,mc,0," + fmt(cont.ess));

  out.criteria.push_back({"sampler-ess-floor", min_ess, tol(cfg, "ess_floor"),
                          min_ess >= tol(cfg, "ess_floor"),
                          "min over continuum and IS rungs"});
  const auto trend = trend_report(ks_ladder, tol(cfg, "trend_slack"));
  out.criteria.push_back({"ks-decreasing", trend.max_step_ratio,
                          1.0 + tol(cfg, "trend_slack"), trend.decreasing,
                          "max KS step ratio"});
  out.criteria.push_back({"ks-top-rung", ks_ladder.back(), tol(cfg, "ks_top"),
                          ks_ladder.back() < tol(cfg, "ks_top"),
                          "lattice atom floor ~0.43/sqrt(N)"});
}

// Exact big unsigned integer, just enough for binom(200, k).
struct BigUint {
  std::vector<std::uint32_t> limbs{1};
  void mul_small(std::uint64_t m) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs) {
      const std::uint64_t cur = static_cast<std::uint64_t>(limb) * m + carry;
      limb = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    while (carry != 0) {
      limbs.push_back(static_cast<std::uint32_t>(carry));
      carry >>= 32;
    }
  }
  void div_small_exact(std::uint64_t d) {
    std::uint64_t rem = 0;
    for (std::size_t i = limbs.size(); i-- > 0;) {
      const std::uint64_t cur = (rem << 32) | limbs[i];
      limbs[i] = static_cast<std::uint32_t>(cur / d);
      rem = cur % d;
    }
    while (limbs.size() > 1 && limbs.back() == 0) limbs.pop_back();
    if (rem != 0) throw std::logic_error("BigUint: inexact division");
  }
  double log2_value() const {
    long double mant = 0.0L;
    std::size_t used = 0;
    for (std::size_t i = limbs.size(); i-- > 0 && used < 3; ++used) {
      mant = mant * 4294967296.0L + limbs[i];
    }
    const std::size_t skipped = limbs.size() > 3 ? limbs.size() - 3 : 0;
    return static_cast<double>(log2l(mant) + 32.0L * skipped);
  }
};

double bigint_comb_ratio(double a, long k, long n) {
  const auto binom = [](long nn, long m) {
    BigUint b;
    for (long i = 1; i <= m; ++i) {
      b.mul_small(static_cast<std::uint64_t>(nn - m + i));
      b.div_small_exact(static_cast<std::uint64_t>(i));
    }
    return b;
  };
  const long shift = std::lround(a * std::sqrt(static_cast<double>(n)));
  const auto b1 = binom(2 * n, n + k);
  const auto b2 = binom(2 * n, n + k + shift);
  return std::exp(-2.0 * a * k / std::sqrt(static_cast<double>(n)) +
                  (b1.log2_value() - b2.log2_value()) * std::log(2.0));
}

void run_bounds(const ExperimentConfig& cfg, ExperimentResult& out) {
  out.csv_lines.push_back("kind,a,n,x_or_k,value");

  // Bessel-envelope consistency of the continuum weight (v >= 0 regime).
  double envelope_max = 0.0;
  if (cfg.v >= 0.0) {
    std::vector<double> xs;
    for (double x = -3.0; x <= 6.0 + 1e-9; x += 0.5) xs.push_back(x);
    const auto rows = kpz_envelope_ratios(
        cfg.u, cfg.v, cfg.length, std::min<long>(cfg.continuum_samples, 50000),
        mix_seed(cfg.seed, 0xE17), xs,
        BrownianPathSpec{cfg.grid_points, cfg.length});
    for (const auto& row : rows) {
      envelope_max = std::max(envelope_max, row.ratio);
      out.csv_lines.push_back("envelope,0,0," + fmt(row.x) + "," + fmt(row.ratio));
    }
    out.criteria.push_back({"envelope-ratio-bounded", envelope_max,
                            tol(cfg, "envelope_cap"),
                            std::isfinite(envelope_max) &&
                                envelope_max <= tol(cfg, "envelope_cap"),
                            "sup over x in [-3, 6]"});
  }

  // Tilted binomial ratio: finite sups, settling in N, exact cross-check.
  const std::vector<double> a_values = {0.5, 1.0, 2.0};
  double fitted_worst = 0.0;
  double settle_worst = 0.0;
  double bigint_worst = 0.0;
  for (double a : a_values) {
    std::vector<double> sups;
    for (long n : cfg.n_ladder) {
      const auto sup = combapprox_sup(a, n);
      sups.push_back(sup.sup_ratio);
      out.csv_lines.push_back("combapprox," + fmt(a) + "," + fmt_long(n) + "," +
                              fmt_long(sup.argmax_k) + "," + fmt(sup.sup_ratio));
      fitted_worst = std::max(fitted_worst, sup.sup_ratio / std::exp(a * a));
    }
    for (std::size_t i = 1; i < sups.size(); ++i) {
      if (cfg.n_ladder[i] >= 1000) {
        settle_worst = std::max(settle_worst, sups[i] / sups[i - 1]);
      }
    }
    for (long k : {0L, 5L, -10L, 13L}) {
      const double exact = bigint_comb_ratio(a, k, 100);
      const double viagamma = comb_ratio(a, k, 100);
      const double rel = std::abs(exact - viagamma) / exact;
      bigint_worst = std::max(bigint_worst, rel);
      out.csv_lines.push_back("bigint-check," + fmt(a) + ",100," + fmt_long(k) +
                              "," + fmt(rel));
    }
  }
  out.criteria.push_back({"combapprox-fitted-bound", fitted_worst,
                          tol(cfg, "comb_fitted"),
                          std::isfinite(fitted_worst) &&
                              fitted_worst <= tol(cfg, "comb_fitted"),
                          "sup ratio / e^{a^2}"});
  out.criteria.push_back({"combapprox-settling", settle_worst, tol(cfg, "comb_settle"),
                          settle_worst <= tol(cfg, "comb_settle"),
                          "step ratio beyond N=1000"});
  out.criteria.push_back({"combapprox-bigint", bigint_worst, tol(cfg, "bigint"),
                          bigint_worst <= tol(cfg, "bigint"),
                          "vs exact integers at N=100"});
}

void run_bessel(const ExperimentConfig& cfg, ExperimentResult& out) {
  out.csv_lines.push_back("mu,nu,a,quadrature,closed_form,relative_residual");
  const double r2 = std::sqrt(2.0);
  const std::vector<std::array<double, 3>> grid = {
      {0.5, 0.0, 1.0}, {1.0, 0.0, 1.0}, {2.0, 0.0, r2},
      {1.5, 0.5, 1.0}, {2.0, 0.7, 0.8}, {1.0, 0.3, 2.0},
      {3.0, 1.0, 1.0}, {2.5, 1.5, 1.2}, {3.0, 0.0, r2}};
  double worst = 0.0;
  for (const auto& [mu, nu, a] : grid) {
    const auto check = bessel_mellin_check(mu, nu, a);
    worst = std::max(worst, check.relative_residual);
    out.csv_lines.push_back(fmt(mu) + "," + fmt(nu) + "," + fmt(a) + "," +
                            fmt(check.quadrature) + "," + fmt(check.closed_form) +
                            "," + fmt(check.relative_residual));
  }
  out.criteria.push_back({"mellin-identity-residual", worst, tol(cfg, "residual"),
                          worst <= tol(cfg, "residual"), "max over the 9-point grid"});
}

}  // namespace

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) ==
      kExperiments.end()) {
    throw std::domain_error("unknown experiment: " + experiment);
  }
  if (experiment != "bessel" && !(u + v > 0.0)) {
    throw std::domain_error("measure experiments require u + v > 0");
  }
  if (!(length > 0.0)) throw std::domain_error("length must be positive");
  if (n_samples < 1 || continuum_samples < 1 || grid_points < 2) {
    throw std::domain_error("sample counts must be positive");
  }
  if (workers < 1) throw std::domain_error("workers must be at least 1");
}

std::string ExperimentConfig::canonical_json() const {
  // out_dir and workers do not influence the numbers and stay out of the
  // provenance hash.
  json j;
  j["experiment"] = experiment;
  j["u"] = u;
  j["v"] = v;
  j["length"] = length;
  j["n_ladder"] = n_ladder;
  j["n_samples"] = n_samples;
  j["continuum_samples"] = continuum_samples;
  j["grid_points"] = grid_points;
  j["seed"] = seed;
  j["tolerances"] = tolerances;
  return j.dump();
}

std::uint64_t ExperimentConfig::config_hash() const {
  // FNV-1a over the canonical serialization
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_json()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  cfg.experiment = j.at("experiment").get<std::string>();
  cfg.u = j.value("u", cfg.u);
  cfg.v = j.value("v", cfg.v);
  cfg.length = j.value("length", cfg.length);
  if (j.contains("n_ladder")) cfg.n_ladder = j["n_ladder"].get<std::vector<int>>();
  cfg.n_samples = j.value("n_samples", cfg.n_samples);
  cfg.continuum_samples = j.value("continuum_samples", cfg.continuum_samples);
  cfg.grid_points = j.value("grid_points", cfg.grid_points);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (j.contains("tolerances")) {
    cfg.tolerances = j["tolerances"].get<std::map<std::string, double>>();
  }
  if (cfg.n_ladder.empty()) cfg.n_ladder = default_ladder(cfg.experiment);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

bool ExperimentResult::all_pass() const {
  for (const auto& c : criteria) {
    if (!c.pass) return false;
  }
  return true;
}

std::string ExperimentResult::summary_json() const {
  json j;
  j["experiment"] = config.experiment;
  j["version"] = kVersion;
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof hash_buf, "%016" PRIx64, config.config_hash());
  j["config_hash"] = hash_buf;
  j["seed"] = config.seed;
  j["all_pass"] = all_pass();
  json rows = json::array();
  for (const auto& c : criteria) {
    json row;
    row["criterion"] = c.name;
    row["value"] = c.value;
    row["tolerance"] = c.tolerance;
    row["pass"] = c.pass;
    row["detail"] = c.detail;
    rows.push_back(row);
  }
  j["criteria"] = rows;
  return j.dump(2) + "\n";
}

std::string ExperimentResult::csv_text() const {
  std::string out;
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof hash_buf, "%016" PRIx64, config.config_hash());
  out += "# experiment=" + config.experiment + "\n";
  out += std::string("# version=") + kVersion + "\n";
  out += std::string("# config_hash=") + hash_buf + "\n";
  out += "# seed=" + std::to_string(config.seed) + "\n";
  for (const auto& line : csv_lines) out += line + "\n";
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& raw) {
  ExperimentConfig cfg = raw;
  if (cfg.n_ladder.empty()) cfg.n_ladder = default_ladder(cfg.experiment);
  cfg.validate();
  ExperimentResult out;
  out.config = cfg;
  if (cfg.experiment == "triple-check") {
    run_triple_check(cfg, out);
  } else if (cfg.experiment == "pointwise") {
    run_pointwise(cfg, out);
  } else if (cfg.experiment == "zn-convergence") {
    run_zn_convergence(cfg, out);
  } else if (cfg.experiment == "weak-convergence") {
    run_weak_convergence(cfg, out);
  } else if (cfg.experiment == "bounds") {
    run_bounds(cfg, out);
  } else {
    run_bessel(cfg, out);
  }
  return out;
}

std::string write_experiment_files(const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(result.config.out_dir);
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof hash_buf, "%016" PRIx64, result.config.config_hash());
  const std::string stem =
      result.config.experiment + "-" + std::string(hash_buf);
  const fs::path csv_path = fs::path(result.config.out_dir) / (stem + ".csv");
  const fs::path json_path = fs::path(result.config.out_dir) / (stem + ".summary.json");
  std::ofstream csv(csv_path);
  csv << result.csv_text();
  std::ofstream js(json_path);
  js << result.summary_json();
  return csv_path.string();
}

}  // namespace okl
