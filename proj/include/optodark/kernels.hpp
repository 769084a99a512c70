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

#pragma once

// Complex double-precision inner loops behind Operator arithmetic and the
// Lindblad right-hand side. Each kernel has a portable scalar reference and
// an optional AVX2/FMA variant; the variant is picked once at startup.
//
// All matrices are dense, row-major, std::complex<double> (interleaved re/im).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace optodark::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // y[i] += alpha * x[i]
  void (*axpy)(std::size_t n, cplx alpha, const cplx* x, cplx* y);

  // out[i] = y[i] + alpha * x[i]
  void (*waxpy)(std::size_t n, double alpha, const cplx* x, const cplx* y, cplx* out);

  // out[i] = p[i] * (y[i] + alpha * x[i])
  void (*hwaxpy)(std::size_t n, const cplx* p, double alpha, const cplx* x, const cplx* y, cplx* out);

  // sum_i x[i] * y[i]
  cplx (*dotu)(std::size_t n, const cplx* x, const cplx* y);

  // sum_i conj(x[i]) * y[i]
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);

  // out = y^dag for an n x n matrix; out must not alias y.
  void (*adjoint)(std::size_t n, const cplx* y, cplx* out);

  // out = y + y^dag for an n x n matrix; out must not alias y.
  void (*herm_sum)(std::size_t n, const cplx* y, cplx* out);

  // c = a * b for square n x n matrices; c must not alias a or b.
  void (*gemm)(std::size_t n, const cplx* a, const cplx* b, cplx* c);

  // c (+)= alpha * S * b, S given in CSR form with `rows` rows; b and c have
  // `cols` columns. When accumulate is false the rows of c are overwritten.
  void (*csrmm)(std::size_t rows, std::size_t cols, const std::uint32_t* row_ptr,
                const std::uint32_t* col_idx, const cplx* vals, cplx alpha,
                const cplx* b, cplx* c, bool accumulate);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Best table for this machine. OPTODARK_SIMD=scalar in the environment forces
// the reference kernels.
const KernelTable& active();

// Overrides the active table (tests and benchmarks); falls back to scalar
// when the variant is unavailable. Not thread-safe with respect to
// concurrently running kernels.
void select(Isa isa);

std::string_view isa_name(Isa isa);

namespace scalar {
void axpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);
void waxpy(std::size_t n, double alpha, const cplx* x, const cplx* y, cplx* out);
void hwaxpy(std::size_t n, const cplx* p, double alpha, const cplx* x, const cplx* y, cplx* out);
cplx dotu(std::size_t n, const cplx* x, const cplx* y);
cplx dotc(std::size_t n, const cplx* x, const cplx* y);
void adjoint(std::size_t n, const cplx* y, cplx* out);
void herm_sum(std::size_t n, const cplx* y, cplx* out);
void gemm(std::size_t n, const cplx* a, const cplx* b, cplx* c);
void csrmm(std::size_t rows, std::size_t cols, const std::uint32_t* row_ptr,
           const std::uint32_t* col_idx, const cplx* vals, cplx alpha,
           const cplx* b, cplx* c, bool accumulate);
}  // namespace scalar

namespace avx2 {
bool cpu_supported();
void axpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);
void waxpy(std::size_t n, double alpha, const cplx* x, const cplx* y, cplx* out);
void hwaxpy(std::size_t n, const cplx* p, double alpha, const cplx* x, const cplx* y, cplx* out);
cplx dotu(std::size_t n, const cplx* x, const cplx* y);
cplx dotc(std::size_t n, const cplx* x, const cplx* y);
void adjoint(std::size_t n, const cplx* y, cplx* out);
void herm_sum(std::size_t n, const cplx* y, cplx* out);
void gemm(std::size_t n, const cplx* a, const cplx* b, cplx* c);
void csrmm(std::size_t rows, std::size_t cols, const std::uint32_t* row_ptr,
           const std::uint32_t* col_idx, const cplx* vals, cplx alpha,
           const cplx* b, cplx* c, bool accumulate);
}  // namespace avx2

}  // namespace optodark::kernels
