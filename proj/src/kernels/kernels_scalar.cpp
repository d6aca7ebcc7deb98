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

// Scalar reference kernels. These define the semantics; the AVX2 variants
// must match them within the tolerance checked in test_kernels.cpp.

#include <algorithm>
#include <cmath>
#include <limits>

#include "okl/kernels.hpp"

namespace okl::kernels::detail {

namespace {

double sum_exp_scaled_scalar(const double* xs, std::size_t n, double scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(scale * xs[i]);
  return acc;
}

double dot_exp_scaled_scalar(const double* ts, const double* ws, std::size_t n,
                             double scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += ws[i] * std::exp(scale * ts[i]);
  return acc;
}

double sum_log1p_scaled_neg_exp_scalar(const double* gs, std::size_t n,
                                       double shift, double scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = scale * std::exp(-2.0 * (gs[i] + shift));
    if (z >= 1.0) return -std::numeric_limits<double>::infinity();
    acc += std::log1p(-z);
  }
  return acc;
}

WeightMoments weight_moments_scalar(const double* ws, std::size_t n) {
  WeightMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    m.sum += ws[i];
    m.sum_sq += ws[i] * ws[i];
    m.max = std::max(m.max, ws[i]);
  }
  return m;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      &sum_exp_scaled_scalar,
      &dot_exp_scaled_scalar,
      &sum_log1p_scaled_neg_exp_scalar,
      &weight_moments_scalar,
  };
  return table;
}

}  // namespace okl::kernels::detail
