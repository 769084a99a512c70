// Copyright 2026 the optodark authors
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
#include <string>

#include "optodark/kernels.hpp"

namespace optodark::kernels {

namespace avx2 {
bool cpu_supported() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
}  // namespace avx2

namespace {

constexpr KernelTable kScalar{Isa::scalar, "scalar", scalar::axpy, scalar::waxpy, scalar::hwaxpy, scalar::dotu,
                              scalar::dotc, scalar::adjoint, scalar::herm_sum, scalar::gemm, scalar::csrmm};

#if defined(OPTODARK_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, "avx2", avx2::axpy, avx2::waxpy, avx2::hwaxpy, avx2::dotu,
                            avx2::dotc, avx2::adjoint, avx2::herm_sum, avx2::gemm, avx2::csrmm};
#endif

const KernelTable* detect() {
  if (const char* env = std::getenv("OPTODARK_SIMD")) {
    if (std::string(env) == "scalar") return &kScalar;
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(OPTODARK_HAVE_AVX2)
  static const bool ok = avx2::cpu_supported();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  const KernelTable* t = &kScalar;
  if (isa == Isa::avx2) {
    t = avx2_table();
    if (t == nullptr) t = &kScalar;
  }
  current().store(t, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace optodark::kernels
