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

#ifndef OKL_ASEP_HPP
#define OKL_ASEP_HPP

#include <cstdint>
#include <vector>

#include "okl/params.hpp"
#include "okl/stats.hpp"

namespace okl {

// Occupancy states are encoded as bitmasks: bit i-1 set means a particle at
// site i. The same encoding keys the FiniteLaw over states; the height
// increment law uses the identical key (s_i = +1 exactly when bit i-1 set).

/// Hard cap on the exact solvers: 2^14 states.
inline constexpr int kMaxExactSites = 14;

/// Stationary distribution of the open ASEP generator: the unique pi with
/// pi L = 0. Dense null-space solve for N <= 10, power iteration on the
/// uniformized kernel above. Residual ||pi L||_inf <= 1e-12.
FiniteLaw generator_stationary(const AsepParams& params);

/// Max_s' |sum_s pi(s) L(s, s')|, the stationarity residual of a law.
double generator_residual(const AsepParams& params, const FiniteLaw& pi);

/// Pushforward of a state law under tau -> (2 tau_1 - 1, ..., 2 tau_N - 1).
/// The map is a relabeling, so the keys coincide with the state encoding.
FiniteLaw height_increment_law(const FiniteLaw& pi);

struct TrajectoryPoint {
  double time;
  std::uint64_t state;
};

struct GillespieResult {
  std::vector<TrajectoryPoint> trajectory;  // state entered at .time
  double t_end;
};

/// Statistically exact continuous-time trajectory; deterministic given the
/// seed. Ties are impossible: events are selected by a single uniform draw
/// against the fixed ordering (left boundary, bulk bonds left to right,
/// right boundary).
GillespieResult gillespie_simulate(const AsepParams& params, double t_end,
                                   std::uint64_t seed,
                                   std::uint64_t initial_state = 0);

/// Time-weighted empirical state law over [t_start, t_end].
FiniteLaw empirical_state_law(const GillespieResult& run, double t_start);

}  // namespace okl

#endif  // OKL_ASEP_HPP
