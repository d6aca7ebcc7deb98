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

#ifndef OKL_RW_STATIONARY_HPP
#define OKL_RW_STATIONARY_HPP

#include <cstdint>
#include <vector>

#include "okl/params.hpp"
#include "okl/stats.hpp"

namespace okl {

// The reweighted two-dimensional random-walk measure on (r, n, m): an
// N-step walk moving one coordinate by +-1 per step, started at (0,0),
// with offset r > 0, carrying weight
//   4^N C^r A^{n_N + r} prod_{i=0..N} [n_i + r]_q  *  (1/4)^N.
// The 4^N and (1/4)^N cancel but are kept explicit in the evaluator.
// The weight is zero exactly when min_i (n_i + r) <= 0.

struct LatticePath2D {
  int offset_r = 1;
  std::vector<int> n_path;  // length N+1, n_path[0] = 0
  std::vector<int> m_path;  // length N+1, m_path[0] = 0

  /// Exactly one coordinate changes by +-1 per step; offset positive.
  void validate() const;
  int n_steps() const { return static_cast<int>(n_path.size()) - 1; }
};

struct RwWeight {
  double log_weight = 0.0;  // -inf outside the support
  bool in_support = false;
};

RwWeight rw_weight(const LatticePath2D& path, const AbcdParams& abcd, double q);

/// Offset cutoff such that the geometric tail beyond it is below 1e-12 of
/// the partition function: tail_r <= 4^N (AC)^r max(A^N, A^-N) (1-q)^-(N+1).
/// Requires A C < 1 (throws DivergenceError otherwise).
int rw_auto_r_max(const AbcdParams& abcd, double q, int n_steps);

/// log of the partition function, the weight summed over r in [1, r_max]
/// and all 4^N walks (dynamic programming over n + r; m integrates out).
/// r_max = 0 selects rw_auto_r_max.
double rw_log_partition(const AbcdParams& abcd, double q, int n_steps,
                        int r_max = 0);

/// Law of the increment signs s_i = (n_i + m_i) - (n_{i-1} + m_{i-1}),
/// keyed by bitmask (bit i-1 set means s_i = +1). N <= 12.
FiniteLaw rw_increment_law(const AbcdParams& abcd, double q, int n_steps,
                           int r_max = 0);

inline constexpr int kMaxIncrementSites = 12;

}  // namespace okl

#endif  // OKL_RW_STATIONARY_HPP
