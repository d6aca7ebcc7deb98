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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "okl/kernels.hpp"

namespace okl::kernels {

namespace {

struct Dispatch {
  Backend backend;
  const detail::KernelTable* table;
};

Dispatch choose_initial() {
  const detail::KernelTable* avx2 = detail::avx2_table();
  const char* env = std::getenv("OKL_BACKEND");
  if (env != nullptr) {
    const std::string name(env);
    if (name == "scalar") return {Backend::kScalar, &detail::scalar_table()};
    if (name == "avx2") {
      if (avx2 == nullptr) {
        throw std::runtime_error("OKL_BACKEND=avx2 but AVX2 is not available");
      }
      return {Backend::kAvx2, avx2};
    }
    throw std::runtime_error("OKL_BACKEND must be 'scalar' or 'avx2'");
  }
  if (avx2 != nullptr) return {Backend::kAvx2, avx2};
  return {Backend::kScalar, &detail::scalar_table()};
}

Dispatch& dispatch() {
  static Dispatch d = choose_initial();
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

void set_backend(Backend backend) {
  if (backend == Backend::kScalar) {
    dispatch() = {Backend::kScalar, &detail::scalar_table()};
    return;
  }
  const detail::KernelTable* avx2 = detail::avx2_table();
  if (avx2 == nullptr) {
    throw std::invalid_argument("AVX2 backend not available on this CPU");
  }
  dispatch() = {Backend::kAvx2, avx2};
}

std::string backend_name(Backend backend) {
  return backend == Backend::kScalar ? "scalar" : "avx2";
}

double sum_exp_scaled(std::span<const double> xs, double scale) {
  return dispatch().table->sum_exp_scaled(xs.data(), xs.size(), scale);
}

double dot_exp_scaled(std::span<const double> ts, std::span<const double> ws,
                      double scale) {
  if (ts.size() != ws.size()) {
    throw std::invalid_argument("dot_exp_scaled: size mismatch");
  }
  return dispatch().table->dot_exp_scaled(ts.data(), ws.data(), ts.size(), scale);
}

double sum_log1p_scaled_neg_exp(std::span<const double> gs, double shift,
                                double scale) {
  return dispatch().table->sum_log1p_scaled_neg_exp(gs.data(), gs.size(), shift,
                                                    scale);
}

WeightMoments weight_moments(std::span<const double> ws) {
  return dispatch().table->weight_moments(ws.data(), ws.size());
}

}  // namespace okl::kernels
