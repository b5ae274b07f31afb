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

#pragma once

// Data-parallel inner loops used by the prox catalog and the residual
// computations. Every kernel has a scalar reference implementation; wider
// variants are compiled into separate translation units and picked once at
// runtime. Elementwise kernels are required to match the reference bit for
// bit; reductions may differ by reassociation only.

#include <cstddef>
#include <span>

#include "fca/common.hpp"

namespace fca::simd {

enum class Isa { scalar, avx2 };

struct KernelSet {
  Isa isa;
  const char* name;
  /// out = min(max(z, lo), hi), componentwise.
  void (*clamp)(std::span<const double> z, std::span<const double> lo, std::span<const double> hi,
                std::span<double> out);
  void (*clamp_uniform)(std::span<const double> z, double lo, double hi, std::span<double> out);
  /// out = z - clamp(z, -t, t)
  void (*soft_threshold)(std::span<const double> z, double t, std::span<double> out);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  double (*norm_inf)(std::span<const double> a);
};

const KernelSet& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelSet* avx2_kernels();

/// The set used by the library. Chosen on first use: the widest supported
/// variant, unless FCA_ALM_SIMD=scalar is set in the environment.
const KernelSet& active_kernels();

} // namespace fca::simd

namespace fca {

inline std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> as_span(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);

} // namespace fca
