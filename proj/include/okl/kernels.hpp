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

#ifndef OKL_KERNELS_HPP
#define OKL_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string>

// Arithmetic inner loops shared by the weight evaluators and samplers.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the active variant is picked once at runtime (cpuid), and can be forced
// with set_backend() or the OKL_BACKEND environment variable
// ("scalar" / "avx2"). The two variants are equivalence-tested against
// each other and against a long-double reference.

namespace okl::kernels {

enum class Backend { kScalar, kAvx2 };

/// Backend currently in use.
Backend active_backend();

/// Force a backend. Throws std::invalid_argument if unavailable on this CPU.
void set_backend(Backend backend);

std::string backend_name(Backend backend);

/// Sum of exp(scale * x_i).
double sum_exp_scaled(std::span<const double> xs, double scale);

/// Sum of w_i * exp(scale * t_i).
double dot_exp_scaled(std::span<const double> ts, std::span<const double> ws,
                      double scale);

/// Sum of log(1 - scale * exp(-2 (g_i + shift))). Returns -infinity if any
/// factor is <= 0, which callers map to "outside the support".
double sum_log1p_scaled_neg_exp(std::span<const double> gs, double shift,
                                double scale);

struct WeightMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  double max = 0.0;
};

/// Sum, sum of squares and max of a nonnegative weight vector.
WeightMoments weight_moments(std::span<const double> ws);

namespace detail {

struct KernelTable {
  double (*sum_exp_scaled)(const double*, std::size_t, double);
  double (*dot_exp_scaled)(const double*, const double*, std::size_t, double);
  double (*sum_log1p_scaled_neg_exp)(const double*, std::size_t, double, double);
  WeightMoments (*weight_moments)(const double*, std::size_t);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when unsupported

}  // namespace detail

}  // namespace okl::kernels

#endif  // OKL_KERNELS_HPP
