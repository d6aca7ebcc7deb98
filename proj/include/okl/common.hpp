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

#ifndef OKL_COMMON_HPP
#define OKL_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace okl {

inline constexpr const char* kVersion = "0.1.0";

/// State space or value table would exceed a hard size limit.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A series or integral does not converge for the given parameters.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An adaptive scheme failed to stabilize; carries the last two estimates.
struct ConvergenceError : std::runtime_error {
  double last_estimate;
  double previous_estimate;
  ConvergenceError(const std::string& what, double last, double previous)
      : std::runtime_error(what), last_estimate(last), previous_estimate(previous) {}
};

/// Importance-sampling output below the reliability gate.
struct EssError : std::runtime_error {
  double ess;
  EssError(const std::string& what, double ess_value)
      : std::runtime_error(what), ess(ess_value) {}
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), safe for -inf arguments.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// Fixed shard count for sampler runs: results are reduced in shard order,
/// so the output is identical for every worker count.
inline constexpr int kSamplerShards = 16;

/// Runs shard_fn(0..kSamplerShards-1) on up to `workers` threads.
inline void run_sharded(int workers, const std::function<void(int)>& shard_fn) {
  if (workers <= 1) {
    for (int s = 0; s < kSamplerShards; ++s) shard_fn(s);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex mu;
  const int n_threads = std::min(workers, kSamplerShards);
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t mine;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= static_cast<std::size_t>(kSamplerShards)) return;
          mine = next++;
        }
        shard_fn(static_cast<int>(mine));
      }
    });
  }
  for (auto& t : pool) t.join();
}

/// Derives an independent seed from (seed, salt).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// splitmix64, used for seeding streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t state = seed ^ (salt * 0x9e3779b97f4a7c15ull);
  return splitmix64(state);
}

/// xoshiro256++ with an explicit normal sampler. Self-contained so that a
/// seed determines the byte-exact output stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
    have_spare_ = false;
  }

  /// Rng for shard `index` of a sampler run; streams are independent.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return Rng(splitmix64(sm));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1} by rejection (unbiased).
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via the polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, r2;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  /// Exponential with rate 1.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace okl

#endif  // OKL_COMMON_HPP
