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

#include "okl/asep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "okl/common.hpp"

namespace okl {

namespace {

struct Transition {
  std::uint32_t to;
  double rate;
};

// Out-transitions of a state in the fixed event order: left boundary,
// bulk bonds left to right, right boundary.
void state_transitions(const AsepParams& p, std::uint64_t s,
                       std::vector<Transition>& out) {
  out.clear();
  const int n = p.n_sites;
  const bool occ1 = (s & 1ull) != 0;
  if (!occ1 && p.alpha > 0.0) out.push_back({static_cast<std::uint32_t>(s | 1ull), p.alpha});
  if (occ1 && p.gamma > 0.0) out.push_back({static_cast<std::uint32_t>(s & ~1ull), p.gamma});
  for (int i = 0; i + 1 < n; ++i) {
    const bool a = (s >> i) & 1ull;
    const bool b = (s >> (i + 1)) & 1ull;
    if (a && !b) {
      out.push_back({static_cast<std::uint32_t>(s ^ (3ull << i)), 1.0});
    } else if (!a && b && p.q > 0.0) {
      out.push_back({static_cast<std::uint32_t>(s ^ (3ull << i)), p.q});
    }
  }
  const std::uint64_t last = 1ull << (n - 1);
  const bool occn = (s & last) != 0;
  if (occn && p.beta > 0.0) out.push_back({static_cast<std::uint32_t>(s & ~last), p.beta});
  if (!occn && p.delta > 0.0) out.push_back({static_cast<std::uint32_t>(s | last), p.delta});
}

std::vector<std::vector<Transition>> build_sparse_generator(const AsepParams& p) {
  const std::size_t n_states = 1ull << p.n_sites;
  std::vector<std::vector<Transition>> gen(n_states);
  std::vector<Transition> scratch;
  for (std::size_t s = 0; s < n_states; ++s) {
    state_transitions(p, s, scratch);
    gen[s] = scratch;
  }
  return gen;
}

// Solve pi L = 0, sum pi = 1 by dense LU on L^T with the last equation
// replaced by normalization.
std::vector<double> dense_stationary(const std::vector<std::vector<Transition>>& gen) {
  const std::size_t n = gen.size();
  std::vector<double> a(n * n, 0.0);
  // a[r * n + c] = L^T[r][c] = L[c][r]
  for (std::size_t s = 0; s < n; ++s) {
    double exit = 0.0;
    for (const auto& t : gen[s]) {
      a[t.to * n + s] += t.rate;
      exit += t.rate;
    }
    a[s * n + s] -= exit;
  }
  std::vector<double> b(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) a[(n - 1) * n + c] = 1.0;
  b[n - 1] = 1.0;

  // LU with partial pivoting, solving in place.
  std::vector<std::size_t> piv(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a[r * n + k]) > std::abs(a[p * n + k])) p = r;
    }
    if (a[p * n + k] == 0.0) {
      throw std::runtime_error("generator_stationary: singular system (reducible chain?)");
    }
    piv[k] = p;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[p * n + c], a[k * n + c]);
      std::swap(b[p], b[k]);
    }
    const double inv = 1.0 / a[k * n + k];
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a[r * n + k] * inv;
      if (f == 0.0) continue;
      a[r * n + k] = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= f * a[k * n + c];
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
    x[ri] = acc / a[ri * n + ri];
  }
  return x;
}

// Power iteration on P = I + L / Lambda. Lambda is a safe upper bound on
// the total exit rate (works for arbitrary nonnegative rates, and reduces
// to about N+3 under Liggett-scaled parameters).
std::vector<double> power_iteration_stationary(
    const AsepParams& p, const std::vector<std::vector<Transition>>& gen) {
  const std::size_t n = gen.size();
  const double lambda = (p.n_sites - 1) * std::max(1.0, p.q) +
                        std::max(p.alpha, p.gamma) + std::max(p.beta, p.delta) + 1.0;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  const long max_iters = 2000000;
  for (long iter = 1; iter <= max_iters; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      double exit = 0.0;
      const double mass = pi[s];
      for (const auto& t : gen[s]) {
        next[t.to] += mass * (t.rate / lambda);
        exit += t.rate;
      }
      next[s] += mass * (1.0 - exit / lambda);
    }
    double total = 0.0;
    for (double v : next) total += v;
    for (auto& v : next) v /= total;
    pi.swap(next);
    if (iter % 64 == 0 || iter == max_iters) {
      // residual of pi L, reusing next as scratch
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t s = 0; s < n; ++s) {
        double exit = 0.0;
        for (const auto& t : gen[s]) {
          next[t.to] += pi[s] * t.rate;
          exit += t.rate;
        }
        next[s] -= pi[s] * exit;
      }
      double res = 0.0;
      for (double v : next) res = std::max(res, std::abs(v));
      if (res <= 1e-13) return pi;
    }
  }
  throw ConvergenceError("generator_stationary: power iteration did not reach 1e-13",
                         pi.front(), pi.back());
}

}  // namespace

FiniteLaw generator_stationary(const AsepParams& params) {
  params.validate();
  if (params.n_sites > kMaxExactSites) {
    throw CapacityError("generator_stationary: n_sites exceeds the exact-solver cap");
  }
  const auto gen = build_sparse_generator(params);
  std::vector<double> pi = params.n_sites <= 10 ? dense_stationary(gen)
                                                : power_iteration_stationary(params, gen);
  FiniteLaw law;
  law.atoms.reserve(pi.size());
  for (std::size_t s = 0; s < pi.size(); ++s) {
    law.atoms.emplace_back(static_cast<std::uint64_t>(s), pi[s]);
  }
  law.normalize();

  const double res = generator_residual(params, law);
  if (res > 1e-12) {
    throw std::runtime_error("generator_stationary: residual above 1e-12");
  }
  return law;
}

double generator_residual(const AsepParams& params, const FiniteLaw& pi) {
  const auto gen = build_sparse_generator(params);
  std::vector<double> flow(gen.size(), 0.0);
  for (const auto& [key, p] : pi.atoms) {
    double exit = 0.0;
    for (const auto& t : gen[key]) {
      flow[t.to] += p * t.rate;
      exit += t.rate;
    }
    flow[key] -= p * exit;
  }
  double res = 0.0;
  for (double v : flow) res = std::max(res, std::abs(v));
  return res;
}

FiniteLaw height_increment_law(const FiniteLaw& pi) {
  pi.validate(1e-10);
  // tau -> (2 tau - 1) is a bijection on bit patterns; the law is a
  // relabeling under the shared encoding.
  return pi;
}

GillespieResult gillespie_simulate(const AsepParams& params, double t_end,
                                   std::uint64_t seed, std::uint64_t initial_state) {
  params.validate();
  if (!(t_end > 0.0)) throw std::domain_error("gillespie_simulate: t_end must be positive");
  if (params.n_sites > 62) throw CapacityError("gillespie_simulate: n_sites too large");
  if (initial_state >> params.n_sites) {
    throw std::domain_error("gillespie_simulate: initial state has bits beyond the lattice");
  }
  Rng rng(seed);
  GillespieResult out;
  out.t_end = t_end;
  double t = 0.0;
  std::uint64_t state = initial_state;
  out.trajectory.push_back({0.0, state});
  std::vector<Transition> moves;
  while (true) {
    state_transitions(params, state, moves);
    double total = 0.0;
    for (const auto& m : moves) total += m.rate;
    if (total <= 0.0) break;  // absorbing (cannot happen for valid params)
    t += rng.exponential() / total;
    if (t >= t_end) break;
    double pick = rng.uniform() * total;
    std::uint64_t next = moves.back().to;
    for (const auto& m : moves) {
      if (pick < m.rate) {
        next = m.to;
        break;
      }
      pick -= m.rate;
    }
    state = next;
    out.trajectory.push_back({t, state});
  }
  return out;
}

FiniteLaw empirical_state_law(const GillespieResult& run, double t_start) {
  if (!(t_start >= 0.0 && t_start < run.t_end)) {
    throw std::domain_error("empirical_state_law: t_start outside [0, t_end)");
  }
  FiniteLaw law;
  const auto& traj = run.trajectory;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double seg_begin = std::max(traj[i].time, t_start);
    const double seg_end = (i + 1 < traj.size()) ? traj[i + 1].time : run.t_end;
    if (seg_end > seg_begin) {
      law.atoms.emplace_back(traj[i].state, seg_end - seg_begin);
    }
  }
  law.sort_and_merge();
  law.normalize();
  return law;
}

}  // namespace okl
