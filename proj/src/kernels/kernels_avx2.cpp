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

// AVX2 kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here runs unless the dispatcher has verified
// cpuid support. exp and log follow the classic Cephes rational
// approximations (relative error ~1-2 ulp over the reduced range),
// log1p uses the atanh series for small arguments.

#include "okl/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace okl::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

// exp(x), Cephes expansion: x = k ln2 + r, e^r = 1 + 2 P(r^2) r / (Q(r^2) - P(r^2) r).
inline __m256d vexp(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
  const __m256d hi_cut = _mm256_set1_pd(709.0);
  const __m256d lo_cut = _mm256_set1_pd(-708.0);

  const __m256d too_hi = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
  const __m256d too_lo = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(k, c1, x);
  x = _mm256_fnmadd_pd(k, c2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(p0, xx, p1);
  px = _mm256_fmadd_pd(px, xx, p2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(q0, xx, q1);
  qx = _mm256_fmadd_pd(qx, xx, q2);
  qx = _mm256_fmadd_pd(qx, xx, q3);
  const __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  __m256d r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // r * 2^k via direct exponent construction; k is within [-1022, 1023].
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));

  r = _mm256_blendv_pd(r, _mm256_set1_pd(std::numeric_limits<double>::infinity()), too_hi);
  r = _mm256_blendv_pd(r, _mm256_setzero_pd(), too_lo);
  return r;
}

// log(x) for positive normal x, Cephes expansion.
inline __m256d vlog(__m256d x) {
  const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  // Split x = m 2^e with m in [0.5, 1).
  const __m256i ibits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_srli_epi64(ibits, 52);
  const __m128i exp32 = _mm256_castsi256_si128(
      _mm256_permutevar8x32_epi32(exp_bits, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0)));
  __m256d e = _mm256_cvtepi32_pd(_mm_sub_epi32(exp32, _mm_set1_epi32(1022)));
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffll);
  const __m256i half_bits = _mm256_set1_epi64x(0x3fe0000000000000ll);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(ibits, mant_mask), half_bits));

  const __m256d below = _mm256_cmp_pd(m, sqrth, _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
  // x <- 2m - 1 (m < sqrt(1/2)) or m - 1.
  const __m256d m2 = _mm256_blendv_pd(m, _mm256_add_pd(m, m), below);
  __m256d xr = _mm256_sub_pd(m2, one);

  const __m256d z = _mm256_mul_pd(xr, xr);
  __m256d p = _mm256_set1_pd(1.01875663804580931796e-4);
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(4.97494994976747001425e-1));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(4.70579119878881725854e0));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(1.44989225341610930846e1));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(1.79368678507819816313e1));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(7.70838733755885391666e0));
  __m256d q = _mm256_add_pd(xr, _mm256_set1_pd(1.12873587189167450590e1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(4.52279145837532221105e1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(8.29875266912776603211e1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(7.11544750618563894466e1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(2.31251620126765340583e1));

  __m256d y = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(xr, z), p), q);
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(z, half, y);
  __m256d result = _mm256_add_pd(xr, y);
  result = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), result);
  return result;
}

// log1p(w) for w in (-1, 0]: atanh series when |w| <= 0.25, full log otherwise.
inline __m256d vlog1p_neg(__m256d w) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d s = _mm256_div_pd(w, _mm256_add_pd(two, w));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(1.0 / 21.0);
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 19.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 17.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 15.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 13.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 11.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 9.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 7.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 5.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 3.0));
  const __m256d series =
      _mm256_fmadd_pd(_mm256_mul_pd(_mm256_mul_pd(two, s), s2), poly,
                      _mm256_mul_pd(two, s));

  const __m256d big = _mm256_cmp_pd(w, _mm256_set1_pd(-0.25), _CMP_LT_OQ);
  if (_mm256_movemask_pd(big) == 0) return series;
  // Clamp the log argument away from zero for the lanes taking the series
  // branch, so vlog never sees its input before blending.
  const __m256d arg = _mm256_max_pd(_mm256_add_pd(one, w),
                                    _mm256_set1_pd(1e-300));
  return _mm256_blendv_pd(series, vlog(arg), big);
}

double sum_exp_scaled_avx2(const double* xs, std::size_t n, double scale) {
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, vexp(_mm256_mul_pd(vs, _mm256_loadu_pd(xs + i))));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += std::exp(scale * xs[i]);
  return total;
}

double dot_exp_scaled_avx2(const double* ts, const double* ws, std::size_t n,
                           double scale) {
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = vexp(_mm256_mul_pd(vs, _mm256_loadu_pd(ts + i)));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(ws + i), e, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += ws[i] * std::exp(scale * ts[i]);
  return total;
}

double sum_log1p_scaled_neg_exp_avx2(const double* gs, std::size_t n,
                                     double shift, double scale) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d minus_two = _mm256_set1_pd(-2.0);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(gs + i);
    const __m256d z = _mm256_mul_pd(
        vscale, vexp(_mm256_mul_pd(minus_two, _mm256_add_pd(g, vshift))));
    if (_mm256_movemask_pd(_mm256_cmp_pd(z, one, _CMP_GE_OQ)) != 0) {
      return -std::numeric_limits<double>::infinity();
    }
    acc = _mm256_add_pd(acc, vlog1p_neg(_mm256_sub_pd(_mm256_setzero_pd(), z)));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double z = scale * std::exp(-2.0 * (gs[i] + shift));
    if (z >= 1.0) return -std::numeric_limits<double>::infinity();
    total += std::log1p(-z);
  }
  return total;
}

WeightMoments weight_moments_avx2(const double* ws, std::size_t n) {
  __m256d sum = _mm256_setzero_pd();
  __m256d sum_sq = _mm256_setzero_pd();
  __m256d vmax = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(ws + i);
    sum = _mm256_add_pd(sum, w);
    sum_sq = _mm256_fmadd_pd(w, w, sum_sq);
    vmax = _mm256_max_pd(vmax, w);
  }
  WeightMoments m;
  m.sum = hsum(sum);
  m.sum_sq = hsum(sum_sq);
  m.max = hmax(vmax);
  for (; i < n; ++i) {
    m.sum += ws[i];
    m.sum_sq += ws[i] * ws[i];
    m.max = std::max(m.max, ws[i]);
  }
  return m;
}

const KernelTable avx2_kernels{
    &sum_exp_scaled_avx2,
    &dot_exp_scaled_avx2,
    &sum_log1p_scaled_neg_exp_avx2,
    &weight_moments_avx2,
};

}  // namespace

const KernelTable* avx2_table() {
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &avx2_kernels;
  }
#endif
  return nullptr;
}

}  // namespace okl::kernels::detail

#else  // non-x86 build: no AVX2 variant.

namespace okl::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace okl::kernels::detail

#endif
