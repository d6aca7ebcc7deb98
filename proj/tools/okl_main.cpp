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

// okl: open ASEP / open KPZ stationary-measure toolkit.
//
//   okl asep exact|sim      exact or simulated occupancy law as CSV
//   okl mpa eval            matrix-product state probabilities as CSV
//   okl rw law              reweighted-walk increment law + partition fn
//   okl scaling zn-sweep|pointwise|combapprox
//   okl kpz z|sample|bessel-check
//   okl run --config c.json experiment runner with pass/fail summary

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "okl/asep.hpp"
#include "okl/bessel.hpp"
#include "okl/common.hpp"
#include "okl/experiments.hpp"
#include "okl/kpz.hpp"
#include "okl/mpa.hpp"
#include "okl/params.hpp"
#include "okl/rw_stationary.hpp"
#include "okl/scaling.hpp"
#include "okl/stats.hpp"

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string state_bits(std::uint64_t state, int n_sites) {
  std::string s;
  for (int i = 0; i < n_sites; ++i) s += ((state >> i) & 1ull) ? '1' : '0';
  return s;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

struct AsepCliParams {
  double alpha = 0.5, beta = 0.5, gamma = 0.1, delta = 0.1, q = 0.3;
  int n_sites = 4;
  double u = 0.0, v = 0.0;  // when u+v > 0, derive the rates by scaling
  okl::AsepParams resolve() const {
    if (u + v > 0.0) {
      return okl::scaling_to_asep(okl::ScalingSpec{n_sites, u, v, 1.0}).asep;
    }
    okl::AsepParams p{alpha, beta, gamma, delta, q, n_sites};
    p.validate();
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open ASEP / open KPZ stationary measure toolkit"};
  app.require_subcommand(1);
  std::string out_path;

  // ---- asep ----
  auto* asep = app.add_subcommand("asep", "open ASEP exact and simulated laws");
  asep->require_subcommand(1);
  AsepCliParams ap;
  double t_end = 1000.0;
  std::uint64_t seed = 1;
  for (auto* sub : {asep->add_subcommand("exact", "stationary law from the generator"),
                    asep->add_subcommand("sim", "time-averaged law from a trajectory")}) {
    sub->add_option("--n-sites", ap.n_sites);
    sub->add_option("--alpha", ap.alpha);
    sub->add_option("--beta", ap.beta);
    sub->add_option("--gamma", ap.gamma);
    sub->add_option("--delta", ap.delta);
    sub->add_option("--q", ap.q);
    sub->add_option("--u", ap.u, "with --v: derive rates by weak-asymmetry scaling");
    sub->add_option("--v", ap.v);
    sub->add_option("--out", out_path);
  }
  asep->get_subcommand("sim")->add_option("--t-end", t_end);
  asep->get_subcommand("sim")->add_option("--seed", seed);

  // ---- mpa ----
  auto* mpa = app.add_subcommand("mpa", "matrix product ansatz evaluation");
  auto* mpa_eval = mpa->add_subcommand("eval", "state probabilities");
  int mpa_n = 4;
  double mpa_u = 1.0, mpa_v = 1.0, mpa_len = 1.0;
  mpa_eval->add_option("--n-sites", mpa_n)->required();
  mpa_eval->add_option("--u", mpa_u)->required();
  mpa_eval->add_option("--v", mpa_v)->required();
  mpa_eval->add_option("--length", mpa_len);
  mpa_eval->add_option("--out", out_path);

  // ---- rw ----
  auto* rw = app.add_subcommand("rw", "reweighted two-dimensional walk measure");
  auto* rw_law = rw->add_subcommand("law", "increment law and partition function");
  int rw_n = 4;
  double rw_u = 1.0, rw_v = 1.0;
  bool rw_json = false;
  rw_law->add_option("--n-steps", rw_n)->required();
  rw_law->add_option("--u", rw_u)->required();
  rw_law->add_option("--v", rw_v)->required();
  rw_law->add_flag("--json", rw_json);
  rw_law->add_option("--out", out_path);

  // ---- scaling ----
  auto* scaling = app.add_subcommand("scaling", "rescaled lattice measures");
  auto* zn = scaling->add_subcommand("zn-sweep", "partition function ladder");
  std::vector<int> ladder;
  double su = 1.0, sv = 1.0, slen = 1.0;
  long samples = 400000;
  int workers = 1;
  zn->add_option("--u", su);
  zn->add_option("--v", sv);
  zn->add_option("--length", slen);
  zn->add_option("--ladder", ladder)->delimiter(',');
  zn->add_option("--samples", samples);
  zn->add_option("--seed", seed);
  zn->add_option("--workers", workers);
  zn->add_option("--out", out_path);
  auto* pw = scaling->add_subcommand("pointwise", "pointwise convergence sweep");
  std::string pw_path = "const";
  double pw_x = 0.0;
  pw->add_option("--u", su);
  pw->add_option("--v", sv);
  pw->add_option("--length", slen);
  pw->add_option("--path", pw_path, "const | sin | ramp");
  pw->add_option("--x", pw_x);
  pw->add_option("--ladder", ladder)->delimiter(',');
  pw->add_option("--out", out_path);
  auto* comb = scaling->add_subcommand("combapprox", "tilted binomial ratio sups");
  std::vector<double> comb_a{0.5, 1.0, 2.0};
  std::vector<long> comb_n{100, 1000, 10000};
  comb->add_option("--a", comb_a)->delimiter(',');
  comb->add_option("--n-list", comb_n)->delimiter(',');
  comb->add_option("--out", out_path);

  // ---- kpz ----
  auto* kpz = app.add_subcommand("kpz", "continuum stationary measure");
  auto* kz = kpz->add_subcommand("z", "partition function estimate");
  double ku = 1.0, kv = 1.0, klen = 1.0;
  long kpaths = 200000;
  int kgrid = 512;
  kz->add_option("--u", ku)->required();
  kz->add_option("--v", kv)->required();
  kz->add_option("--length", klen);
  kz->add_option("--samples", kpaths);
  kz->add_option("--grid", kgrid);
  kz->add_option("--seed", seed);
  kz->add_option("--workers", workers);
  kz->add_option("--out", out_path);
  auto* ks = kpz->add_subcommand("sample", "importance samples of the measure");
  ks->add_option("--u", ku)->required();
  ks->add_option("--v", kv)->required();
  ks->add_option("--length", klen);
  ks->add_option("--samples", kpaths);
  ks->add_option("--grid", kgrid);
  ks->add_option("--seed", seed);
  ks->add_option("--workers", workers);
  ks->add_option("--out", out_path);
  auto* kb = kpz->add_subcommand("bessel-check", "Mellin identity residual");
  double kmu = 1.0, knu = 0.0, ka = 1.0;
  bool kb_grid = false;
  kb->add_option("--mu", kmu);
  kb->add_option("--nu", knu);
  kb->add_option("--a", ka);
  kb->add_flag("--grid", kb_grid, "run the standard 9-point grid");
  kb->add_option("--out", out_path);

  // ---- run ----
  auto* run = app.add_subcommand("run", "experiment runner");
  std::string config_path;
  std::string run_out;
  std::uint64_t run_seed = 0;
  bool has_seed = false;
  run->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed);
  auto* seed_opt = run->get_option("--seed");
  run->add_option("--out", run_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (asep->parsed()) {
      const auto params = ap.resolve();
      okl::FiniteLaw law;
      if (asep->get_subcommand("exact")->parsed()) {
        law = okl::generator_stationary(params);
      } else {
        const auto runres = okl::gillespie_simulate(params, t_end, seed);
        law = okl::empirical_state_law(runres, 0.1 * t_end);
      }
      std::string text = "state-bits,probability\n";
      for (const auto& [state, p] : law.atoms) {
        text += state_bits(state, params.n_sites) + "," + fmt(p) + "\n";
      }
      emit(out_path, text);
    } else if (mpa->parsed()) {
      const okl::ScalingSpec spec{mpa_n, mpa_u, mpa_v, mpa_len};
      const auto scaled = okl::scaling_to_asep(spec);
      const auto law = okl::mpa_state_law(scaled.abcd, scaled.asep.q, mpa_n);
      std::string text = "state-bits,probability\n";
      for (const auto& [state, p] : law.atoms) {
        text += state_bits(state, mpa_n) + "," + fmt(p) + "\n";
      }
      emit(out_path, text);
    } else if (rw->parsed()) {
      const okl::ScalingSpec spec{rw_n, rw_u, rw_v, 1.0};
      const auto scaled = okl::scaling_to_asep(spec);
      const double log_z = okl::rw_log_partition(scaled.abcd, scaled.asep.q, rw_n);
      const auto law = okl::rw_increment_law(scaled.abcd, scaled.asep.q, rw_n);
      std::string text;
      if (rw_json) {
        text += "{\n  \"log_partition\": " + fmt(log_z) + ",\n  \"law\": {\n";
        bool first = true;
        for (const auto& [signs, p] : law.atoms) {
          if (!first) text += ",\n";
          first = false;
          text += "    \"" + state_bits(signs, rw_n) + "\": " + fmt(p);
        }
        text += "\n  }\n}\n";
      } else {
        text = "# log_partition=" + fmt(log_z) + "\nsign-bits,probability\n";
        for (const auto& [signs, p] : law.atoms) {
          text += state_bits(signs, rw_n) + "," + fmt(p) + "\n";
        }
      }
      emit(out_path, text);
    } else if (scaling->parsed()) {
      if (zn->parsed()) {
        if (ladder.empty()) ladder = {4, 8, 12, 16, 32, 64};
        std::string text = "n,method,value,std_error,ess\n";
        for (int n : ladder) {
          const okl::ScalingSpec spec{n, su, sv, slen};
          const auto window = okl::sound_x_window(spec);
          if (n <= okl::kMaxExactDpSteps) {
            text += std::to_string(n) + ",exact," +
                    fmt(okl::zn_partition_exact(spec, window)) + ",0,0\n";
          } else {
            const auto est = okl::zn_partition_is(spec, window, samples,
                                                  okl::mix_seed(seed, n), workers);
            text += std::to_string(n) + ",is," + fmt(est.value) + "," +
                    fmt(est.std_error) + "," + fmt(est.ess) + "\n";
          }
        }
        emit(out_path, text);
      } else if (pw->parsed()) {
        if (ladder.empty()) ladder = {16, 64, 256, 1024, 4096};
        std::function<double(double)> g;
        if (pw_path == "const") {
          g = [](double) { return 0.0; };
        } else if (pw_path == "sin") {
          g = [](double t) { return std::sin(2.0 * M_PI * t); };
        } else if (pw_path == "ramp") {
          g = [](double t) { return 0.5 * t + 0.3 * std::sin(2.0 * t); };
        } else {
          throw std::domain_error("unknown --path (use const | sin | ramp)");
        }
        const auto rows = okl::pointwise_convergence_check(g, pw_x, su, sv, slen, ladder);
        std::string text =
            "n,h_discrete,h_limit,abs_error,max_factor,sum_gap,abs_sum,taylor_tail\n";
        for (const auto& r : rows) {
          text += std::to_string(r.n_steps) + "," + fmt(r.h_discrete) + "," +
                  fmt(r.h_limit) + "," + fmt(r.abs_error) + "," + fmt(r.max_factor) +
                  "," + fmt(r.sum_gap) + "," + fmt(r.abs_sum) + "," +
                  fmt(r.taylor_tail) + "\n";
        }
        emit(out_path, text);
      } else {
        std::string text = "a,n,sup_ratio,argmax_k\n";
        for (double a : comb_a) {
          for (long n : comb_n) {
            const auto sup = okl::combapprox_sup(a, n);
            text += fmt(a) + "," + std::to_string(n) + "," + fmt(sup.sup_ratio) +
                    "," + std::to_string(sup.argmax_k) + "\n";
          }
        }
        emit(out_path, text);
      }
    } else if (kpz->parsed()) {
      if (kz->parsed()) {
        const auto est = okl::z_continuum(ku, kv, klen, kpaths, seed,
                                          okl::BrownianPathSpec{kgrid, klen}, workers);
        std::string text = "value,std_error,window_lo,window_hi,n_paths,seed\n";
        text += fmt(est.value) + "," + fmt(est.std_error) + "," + fmt(est.window_lo) +
                "," + fmt(est.window_hi) + "," + std::to_string(est.n_paths) + "," +
                std::to_string(seed) + "\n";
        emit(out_path, text);
      } else if (ks->parsed()) {
        const auto batch = okl::kpz_q_sample(ku, kv, klen, kpaths, seed,
                                             okl::BrownianPathSpec{kgrid, klen}, workers);
        std::string text = "# ess=" + fmt(batch.ess) + " seed=" + std::to_string(seed) +
                           "\nx,g_end,h_end,gh_end,gh_mid,weight\n";
        for (std::size_t i = 0; i < batch.x.size(); ++i) {
          text += fmt(batch.x[i]) + "," + fmt(batch.g_end[i]) + "," +
                  fmt(batch.h_end[i]) + "," + fmt(batch.gh_end[i]) + "," +
                  fmt(batch.gh_mid[i]) + "," + fmt(batch.weights[i]) + "\n";
        }
        emit(out_path, text);
      } else {
        std::string text = "mu,nu,a,quadrature,closed_form,relative_residual\n";
        std::vector<std::array<double, 3>> grid;
        if (kb_grid) {
          const double r2 = std::sqrt(2.0);
          grid = {{0.5, 0.0, 1.0}, {1.0, 0.0, 1.0}, {2.0, 0.0, r2},
                  {1.5, 0.5, 1.0}, {2.0, 0.7, 0.8}, {1.0, 0.3, 2.0},
                  {3.0, 1.0, 1.0}, {2.5, 1.5, 1.2}, {3.0, 0.0, r2}};
        } else {
          grid = {{kmu, knu, ka}};
        }
        for (const auto& [mu, nu, a] : grid) {
          const auto check = okl::bessel_mellin_check(mu, nu, a);
          text += fmt(mu) + "," + fmt(nu) + "," + fmt(a) + "," + fmt(check.quadrature) +
                  "," + fmt(check.closed_form) + "," + fmt(check.relative_residual) +
                  "\n";
        }
        emit(out_path, text);
      }
    } else if (run->parsed()) {
      auto cfg = okl::ExperimentConfig::from_json_file(config_path);
      if (seed_opt->count() > 0) cfg.seed = run_seed;
      (void)has_seed;
      if (!run_out.empty()) cfg.out_dir = run_out;
      const auto result = okl::run_experiment(cfg);
      const std::string csv_path = okl::write_experiment_files(result);
      int failures = 0;
      for (const auto& c : result.criteria) {
        std::printf("[%s] %s: value=%s tolerance=%s (%s)\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), fmt(c.value).c_str(),
                    fmt(c.tolerance).c_str(), c.detail.c_str());
        if (!c.pass) ++failures;
      }
      std::printf("results: %s\n", csv_path.c_str());
      if (failures > 0) {
        std::fprintf(stderr, "%d criterion(s) failed\n", failures);
        return 1;
      }
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 0;
}
