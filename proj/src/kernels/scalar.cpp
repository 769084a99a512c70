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

#include "optodark/kernels.hpp"

#include <algorithm>

namespace optodark::kernels::scalar {

void axpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = cplx(y[i].real() + (ar * xr - ai * xi), y[i].imag() + (ar * xi + ai * xr));
  }
}

void waxpy(std::size_t n, double alpha, const cplx* x, const cplx* y, cplx* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cplx(y[i].real() + alpha * x[i].real(), y[i].imag() + alpha * x[i].imag());
  }
}

void hwaxpy(std::size_t n, const cplx* p, double alpha, const cplx* x, const cplx* y, cplx* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = y[i].real() + alpha * x[i].real();
    const double im = y[i].imag() + alpha * x[i].imag();
    out[i] = cplx(p[i].real() * re - p[i].imag() * im, p[i].real() * im + p[i].imag() * re);
  }
}

cplx dotu(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void adjoint(std::size_t n, const cplx* y, cplx* out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * n + i] = std::conj(y[i * n + j]);
}

void herm_sum(std::size_t n, const cplx* y, cplx* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i * n + i] = 2.0 * y[i * n + i].real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = y[i * n + j] + std::conj(y[j * n + i]);
      out[i * n + j] = v;
      out[j * n + i] = std::conj(v);
    }
  }
}

void gemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
  std::fill(c, c + n * n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      if (aik == cplx{}) continue;
      axpy(n, aik, b + k * n, crow);
    }
  }
}

void csrmm(std::size_t rows, std::size_t cols, const std::uint32_t* row_ptr,
           const std::uint32_t* col_idx, const cplx* vals, cplx alpha,
           const cplx* b, cplx* c, bool accumulate) {
  for (std::size_t i = 0; i < rows; ++i) {
    cplx* crow = c + i * cols;
    if (!accumulate) std::fill(crow, crow + cols, cplx{});
    for (std::uint32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      axpy(cols, alpha * vals[k], b + std::size_t{col_idx[k]} * cols, crow);
    }
  }
}

}  // namespace optodark::kernels::scalar
