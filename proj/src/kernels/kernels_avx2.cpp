// Copyright 2026 The fca-alm Authors
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

// Compiled with -mavx2 -mfma. Nothing in here may run unless the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <cmath>

#include "fca/kernels.hpp"

namespace fca::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double max_like(double a, double b) { return a > b ? a : b; }
inline double min_like(double a, double b) { return a < b ? a : b; }

void clamp(std::span<const double> z, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out) {
  const std::size_t n = z.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d v = _mm256_loadu_pd(z.data() + i);
    v = _mm256_max_pd(v, _mm256_loadu_pd(lo.data() + i));
    v = _mm256_min_pd(v, _mm256_loadu_pd(hi.data() + i));
    _mm256_storeu_pd(out.data() + i, v);
  }
  for (; i < n; ++i) out[i] = min_like(max_like(z[i], lo[i]), hi[i]);
}

void clamp_uniform(std::span<const double> z, double lo, double hi, std::span<double> out) {
  const std::size_t n = z.size();
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d v = _mm256_loadu_pd(z.data() + i);
    v = _mm256_min_pd(_mm256_max_pd(v, vlo), vhi);
    _mm256_storeu_pd(out.data() + i, v);
  }
  for (; i < n; ++i) out[i] = min_like(max_like(z[i], lo), hi);
}

void soft_threshold(std::span<const double> z, double t, std::span<double> out) {
  const std::size_t n = z.size();
  const __m256d vlo = _mm256_set1_pd(-t);
  const __m256d vhi = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(z.data() + i);
    const __m256d c = _mm256_min_pd(_mm256_max_pd(v, vlo), vhi);
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(v, c));
  }
  for (; i < n; ++i) out[i] = z[i] - min_like(max_like(z[i], -t), t);
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + kLanes),
                           _mm256_loadu_pd(b.data() + i + kLanes), acc1);
  }
  for (; i + kLanes <= n; i += kLanes)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc0);
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(std::span<const double> a) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    m = _mm256_max_pd(_mm256_andnot_pd(sign, _mm256_loadu_pd(a.data() + i)), m);
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, m);
  double r = max_like(max_like(lanes[0], lanes[1]), max_like(lanes[2], lanes[3]));
  for (; i < n; ++i) r = max_like(std::fabs(a[i]), r);
  return r;
}

} // namespace

const KernelSet& kernels() {
  static const KernelSet set{Isa::avx2, "avx2", clamp, clamp_uniform, soft_threshold, dot, norm_inf};
  return set;
}

} // namespace fca::simd::avx2
