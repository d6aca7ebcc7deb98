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

#ifndef OKL_MPA_HPP
#define OKL_MPA_HPP

#include <cstdint>
#include <vector>

#include "okl/params.hpp"
#include "okl/stats.hpp"

namespace okl {

// Matrix product ansatz in the bidiagonal (Enaud-Derrida) representation.
// D has rows ([n]_q, [n]_q) on (n, n) and (n, n+1); E has ([n]_q, [n]_q) on
// (n, n-1) and (n, n); <W|_n = C^n, |V>_n = A^n [n]_q. Truncation to
// dimension M drops every entry referencing index M+1.

struct TruncatedRep {
  int dim = 0;
  double q = 0.0;
  double a_param = 0.0;
  double c_param = 0.0;
  std::vector<double> bracket;  // [n]_q for n = 1..M (0-indexed n-1)
  std::vector<double> w_vec;    // C^n
  std::vector<double> v_vec;    // A^n [n]_q
};

/// Builds the truncated representation. Requires M >= 2 and A, C < 1
/// (geometric decay of the boundary vectors); otherwise the truncation
/// diverges and the random-walk construction must be used instead.
TruncatedRep build_rep(const AbcdParams& abcd, double q, int dim);

struct DehpResiduals {
  double bulk;       // max interior |(DE - qED - D - E)[i][j]|
  double right_vec;  // max interior |((beta D - delta E)|V> - |V>)[i]|
  double left_vec;   // max interior |(<W|(alpha E - gamma D) - <W|)[j]|
};

/// Residuals of the DEHP relations over interior indices (rows/cols <= M-1);
/// the last row/column is a truncation artifact and is excluded.
DehpResiduals check_dehp_relations(const TruncatedRep& rep, const AsepParams& rates);

/// <W| prod_i (D tau_i + E (1-tau_i)) |V> / <W|(D+E)^N|V> by vector-matrix
/// sweeps in scaled arithmetic. The truncation dimension is adapted
/// (doubling from `start_dim`, capped at `max_dim`) until the value is
/// stable to 1e-10 relative; non-convergence raises ConvergenceError with
/// the last two estimates.
double mpa_state_probability(const AbcdParams& abcd, double q, int n_sites,
                             std::uint64_t tau, int start_dim = 32,
                             int max_dim = 4096);

/// All 2^N state probabilities as a FiniteLaw keyed by occupancy bits.
FiniteLaw mpa_state_law(const AbcdParams& abcd, double q, int n_sites);

}  // namespace okl

#endif  // OKL_MPA_HPP
