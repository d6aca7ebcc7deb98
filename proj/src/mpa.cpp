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

#include "okl/mpa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "okl/common.hpp"

namespace okl {

namespace {

// Row-vector sweeps against the bidiagonal matrices; O(M) per site.
// (w D)[j] = w[j] [j]_q + w[j-1] [j-1]_q, (w E)[j] = w[j] [j]_q + w[j+1] [j+1]_q
// (1-indexed; the truncation drops entries referencing index M+1).
void apply_site(const std::vector<double>& bracket, const std::vector<double>& w,
                std::vector<double>& out, bool use_d, bool use_e) {
  const std::size_t m = w.size();
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    const double diag = w[j] * bracket[j];
    if (use_d) {
      acc += diag;
      if (j > 0) acc += w[j - 1] * bracket[j - 1];
    }
    if (use_e) {
      acc += diag;
      if (j + 1 < m) acc += w[j + 1] * bracket[j + 1];
    }
    out[j] = acc;
  }
}

// log <W| prod(site matrices) |V>, scaled to avoid overflow/underflow.
double log_sweep(const TruncatedRep& rep, std::uint64_t tau, int n_sites,
                 bool denominator) {
  const std::size_t m = static_cast<std::size_t>(rep.dim);
  std::vector<double> w = rep.w_vec;
  std::vector<double> scratch(m);
  double log_scale = 0.0;
  for (int site = 0; site < n_sites; ++site) {
    const bool particle = (tau >> site) & 1ull;
    if (denominator) {
      apply_site(rep.bracket, w, scratch, true, true);
    } else {
      apply_site(rep.bracket, w, scratch, particle, !particle);
    }
    w.swap(scratch);
    double peak = 0.0;
    for (double x : w) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) return kNegInf;
    for (double& x : w) x /= peak;
    log_scale += std::log(peak);
  }
  double dot = 0.0;
  for (std::size_t j = 0; j < m; ++j) dot += w[j] * rep.v_vec[j];
  if (!(dot > 0.0)) return kNegInf;
  return log_scale + std::log(dot);
}

double state_probability_at_dim(const AbcdParams& abcd, double q, int n_sites,
                                std::uint64_t tau, int dim) {
  const TruncatedRep rep = build_rep(abcd, q, dim);
  const double num = log_sweep(rep, tau, n_sites, false);
  const double den = log_sweep(rep, 0, n_sites, true);
  if (den == kNegInf) throw std::runtime_error("mpa: vanishing normalization");
  return std::exp(num - den);
}

}  // namespace

TruncatedRep build_rep(const AbcdParams& abcd, double q, int dim) {
  if (dim < 2) throw std::domain_error("build_rep: dim must be at least 2");
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("build_rep: q must lie in [0,1)");
  if (!(abcd.a_param < 1.0 && abcd.c_param < 1.0)) {
    throw DivergenceError(
        "build_rep: boundary vectors diverge for A >= 1 or C >= 1; "
        "use the random-walk construction there");
  }
  if (!(abcd.a_param > 0.0 && abcd.c_param > 0.0)) {
    throw std::domain_error("build_rep: A and C must be positive");
  }
  TruncatedRep rep;
  rep.dim = dim;
  rep.q = q;
  rep.a_param = abcd.a_param;
  rep.c_param = abcd.c_param;
  rep.bracket.resize(dim);
  rep.w_vec.resize(dim);
  rep.v_vec.resize(dim);
  const double log_a = std::log(abcd.a_param);
  const double log_c = std::log(abcd.c_param);
  for (int n = 1; n <= dim; ++n) {
    rep.bracket[n - 1] = q_bracket(n, q);
    rep.w_vec[n - 1] = std::exp(n * log_c);
    rep.v_vec[n - 1] = std::exp(n * log_a) * rep.bracket[n - 1];
  }
  return rep;
}

DehpResiduals check_dehp_relations(const TruncatedRep& rep, const AsepParams& rates) {
  const int m = rep.dim;
  const auto& qb = rep.bracket;
  auto at = [&](std::vector<double>& mat, int i, int j) -> double& {
    return mat[static_cast<std::size_t>(i) * m + j];
  };
  std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> e(static_cast<std::size_t>(m) * m, 0.0);
  for (int n = 0; n < m; ++n) {
    at(d, n, n) = qb[n];
    if (n + 1 < m) at(d, n, n + 1) = qb[n];
    at(e, n, n) = qb[n];
    if (n - 1 >= 0) at(e, n, n - 1) = qb[n];
  }
  auto mul = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int l = 0; l < m; ++l) {
        const double v = x[static_cast<std::size_t>(i) * m + l];
        if (v == 0.0) continue;
        for (int j = 0; j < m; ++j) {
          out[static_cast<std::size_t>(i) * m + j] += v * y[static_cast<std::size_t>(l) * m + j];
        }
      }
    }
    return out;
  };

  DehpResiduals res{0.0, 0.0, 0.0};
  const auto de = mul(d, e);
  const auto ed = mul(e, d);
  for (int i = 0; i < m - 1; ++i) {
    for (int j = 0; j < m - 1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * m + j;
      const double r = de[idx] - rep.q * ed[idx] - d[idx] - e[idx];
      res.bulk = std::max(res.bulk, std::abs(r));
    }
  }
  for (int i = 0; i < m - 1; ++i) {
    double dv = 0.0, ev = 0.0;
    for (int j = 0; j < m; ++j) {
      dv += d[static_cast<std::size_t>(i) * m + j] * rep.v_vec[j];
      ev += e[static_cast<std::size_t>(i) * m + j] * rep.v_vec[j];
    }
    res.right_vec = std::max(res.right_vec,
                             std::abs(rates.beta * dv - rates.delta * ev - rep.v_vec[i]));
  }
  for (int j = 0; j < m - 1; ++j) {
    double wd = 0.0, we = 0.0;
    for (int i = 0; i < m; ++i) {
      wd += rep.w_vec[i] * d[static_cast<std::size_t>(i) * m + j];
      we += rep.w_vec[i] * e[static_cast<std::size_t>(i) * m + j];
    }
    res.left_vec = std::max(res.left_vec,
                            std::abs(rates.alpha * we - rates.gamma * wd - rep.w_vec[j]));
  }
  return res;
}

double mpa_state_probability(const AbcdParams& abcd, double q, int n_sites,
                             std::uint64_t tau, int start_dim, int max_dim) {
  if (n_sites < 1) throw std::domain_error("mpa_state_probability: n_sites must be positive");
  double prev = state_probability_at_dim(abcd, q, n_sites, tau, start_dim);
  for (int dim = 2 * start_dim; dim <= max_dim; dim *= 2) {
    const double cur = state_probability_at_dim(abcd, q, n_sites, tau, dim);
    if (std::abs(cur - prev) <= 1e-10 * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  const double last = state_probability_at_dim(abcd, q, n_sites, tau, max_dim);
  if (std::abs(last - prev) <= 1e-10 * std::max(std::abs(last), 1e-300)) return last;
  throw ConvergenceError("mpa_state_probability: truncation did not stabilize",
                         last, prev);
}

FiniteLaw mpa_state_law(const AbcdParams& abcd, double q, int n_sites) {
  if (n_sites < 1 || n_sites > 20) {
    throw CapacityError("mpa_state_law: n_sites out of range");
  }
  const std::uint64_t n_states = 1ull << n_sites;
  // Adapt the truncation globally: cheaper than per-state doubling and the
  // stopping rule is the same 1e-10 relative stability.
  int dim = 32;
  std::vector<double> prev;
  for (; dim <= 4096; dim *= 2) {
    const TruncatedRep rep = build_rep(abcd, q, dim);
    const double den = log_sweep(rep, 0, n_sites, true);
    std::vector<double> cur(n_states);
    for (std::uint64_t tau = 0; tau < n_states; ++tau) {
      cur[tau] = std::exp(log_sweep(rep, tau, n_sites, false) - den);
    }
    if (!prev.empty()) {
      double worst = 0.0;
      for (std::uint64_t s = 0; s < n_states; ++s) {
        worst = std::max(worst,
                         std::abs(cur[s] - prev[s]) / std::max(std::abs(cur[s]), 1e-300));
      }
      if (worst <= 1e-10) {
        FiniteLaw law;
        law.atoms.reserve(n_states);
        for (std::uint64_t s = 0; s < n_states; ++s) law.atoms.emplace_back(s, cur[s]);
        return law;
      }
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("mpa_state_law: truncation did not stabilize",
                         prev.empty() ? 0.0 : prev.front(), 0.0);
}

}  // namespace okl
