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

#include <cmath>

#include "fca/kernels.hpp"

namespace fca::simd {
namespace {

// The ternaries mirror the semantics of the packed max/min instructions
// (second operand wins on ties and NaN), so wider variants can be exact.
inline double max_like(double a, double b) { return a > b ? a : b; }
inline double min_like(double a, double b) { return a < b ? a : b; }

void clamp(std::span<const double> z, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out) {
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = min_like(max_like(z[i], lo[i]), hi[i]);
}

void clamp_uniform(std::span<const double> z, double lo, double hi, std::span<double> out) {
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = min_like(max_like(z[i], lo), hi);
}

void soft_threshold(std::span<const double> z, double t, std::span<double> out) {
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - min_like(max_like(z[i], -t), t);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = max_like(std::fabs(v), m);
  return m;
}

} // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{Isa::scalar, "scalar", clamp, clamp_uniform, soft_threshold, dot, norm_inf};
  return set;
}

} // namespace fca::simd
