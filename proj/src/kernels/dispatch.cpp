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
#include <cstdlib>
#include <string_view>

#include "fca/kernels.hpp"

namespace fca::simd {

#ifdef FCA_HAVE_AVX2
namespace avx2 {
const KernelSet& kernels();
}
#endif

const KernelSet* avx2_kernels() {
#ifdef FCA_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2::kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& active_kernels() {
  static const KernelSet& chosen = []() -> const KernelSet& {
    const char* env = std::getenv("FCA_ALM_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelSet* wide = avx2_kernels()) return *wide;
    return scalar_kernels();
  }();
  return chosen;
}

} // namespace fca::simd

namespace fca {

double dot(const Vec& a, const Vec& b) { return simd::active_kernels().dot(as_span(a), as_span(b)); }

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) { return simd::active_kernels().norm_inf(as_span(a)); }

} // namespace fca
