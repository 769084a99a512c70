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

// Compiled with -mavx2 -mfma. Nothing in this translation unit may run
// before avx2::cpu_supported() (defined in dispatch.cpp) has returned true.

#include "optodark/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace optodark::kernels::avx2 {

namespace {

// Two complex numbers per register: [re0, im0, re1, im1].
struct Bcast {
  __m256d re;
  __m256d im_signed;  // [-im, +im, -im, +im]
  explicit Bcast(cplx a)
      : re(_mm256_set1_pd(a.real())),
        im_signed(_mm256_setr_pd(-a.imag(), a.imag(), -a.imag(), a.imag())) {}
};

// acc + a * x
inline __m256d cmadd(const Bcast& a, __m256d x, __m256d acc) {
  acc = _mm256_fmadd_pd(a.re, x, acc);
  return _mm256_fmadd_pd(a.im_signed, _mm256_permute_pd(x, 0b0101), acc);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [a0 - a1 + a2 - a3]
inline double halt(__m256d v) {
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  return hsum(_mm256_mul_pd(v, sign));
}

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

inline void axpy_impl(std::size_t n, const Bcast& a, const cplx* x, cplx* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d y0 = _mm256_loadu_pd(dp(y + i));
    __m256d y1 = _mm256_loadu_pd(dp(y + i + 2));
    y0 = cmadd(a, _mm256_loadu_pd(dp(x + i)), y0);
    y1 = cmadd(a, _mm256_loadu_pd(dp(x + i + 2)), y1);
    _mm256_storeu_pd(dp(y + i), y0);
    _mm256_storeu_pd(dp(y + i + 2), y1);
  }
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(dp(y + i), cmadd(a, _mm256_loadu_pd(dp(x + i)), _mm256_loadu_pd(dp(y + i))));
  }
  if (i < n) {
    const __m128d xr = _mm_loadu_pd(dp(x + i));
    const __m128d xs = _mm_permute_pd(xr, 0b01);
    __m128d yr = _mm_loadu_pd(dp(y + i));
    yr = _mm_fmadd_pd(_mm256_castpd256_pd128(a.re), xr, yr);
    yr = _mm_fmadd_pd(_mm256_castpd256_pd128(a.im_signed), xs, yr);
    _mm_storeu_pd(dp(y + i), yr);
  }
}

// y += a0 * x0 + a1 * x1, one pass over y.
inline void axpy2_impl(std::size_t n, const Bcast& a0, const cplx* x0, const Bcast& a1,
                       const cplx* x1, cplx* y) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d acc = _mm256_loadu_pd(dp(y + i));
    acc = cmadd(a0, _mm256_loadu_pd(dp(x0 + i)), acc);
    acc = cmadd(a1, _mm256_loadu_pd(dp(x1 + i)), acc);
    _mm256_storeu_pd(dp(y + i), acc);
  }
  if (i < n) {
    axpy_impl(n - i, a0, x0 + i, y + i);
    axpy_impl(n - i, a1, x1 + i, y + i);
  }
}

}  // namespace

void axpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  axpy_impl(n, Bcast(alpha), x, y);
}

void waxpy(std::size_t n, double alpha, const cplx* x, const cplx* y, cplx* out) {
  // treat the arrays as 2n doubles
  const std::size_t m = 2 * n;
  const double* xd = dp(x);
  const double* yd = dp(y);
  double* od = dp(out);
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    _mm256_storeu_pd(od + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(xd + i), _mm256_loadu_pd(yd + i)));
    _mm256_storeu_pd(od + i + 4, _mm256_fmadd_pd(a, _mm256_loadu_pd(xd + i + 4), _mm256_loadu_pd(yd + i + 4)));
  }
  for (; i < m; ++i) od[i] = std::fma(alpha, xd[i], yd[i]);
}

void hwaxpy(std::size_t n, const cplx* p, double alpha, const cplx* x, const cplx* y, cplx* out) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d t = _mm256_fmadd_pd(a, _mm256_loadu_pd(dp(x + i)), _mm256_loadu_pd(dp(y + i)));
    const __m256d pv = _mm256_loadu_pd(dp(p + i));
    const __m256d p_re = _mm256_movedup_pd(pv);
    const __m256d p_im = _mm256_permute_pd(pv, 0b1111);
    const __m256d t_swap = _mm256_permute_pd(t, 0b0101);
    _mm256_storeu_pd(dp(out + i), _mm256_fmaddsub_pd(p_re, t, _mm256_mul_pd(p_im, t_swap)));
  }
  for (; i < n; ++i) {
    const double re = std::fma(alpha, x[i].real(), y[i].real());
    const double im = std::fma(alpha, x[i].imag(), y[i].imag());
    out[i] = cplx(p[i].real() * re - p[i].imag() * im, p[i].real() * im + p[i].imag() * re);
  }
}

cplx dotu(std::size_t n, const cplx* x, const cplx* y) {
  __m256d same = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(dp(x + i));
    const __m256d yv = _mm256_loadu_pd(dp(y + i));
    same = _mm256_fmadd_pd(xv, yv, same);
    cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), cross);
  }
  cplx out(halt(same), hsum(cross));
  if (i < n) out += x[i] * y[i];
  return out;
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  __m256d same = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(dp(x + i));
    const __m256d yv = _mm256_loadu_pd(dp(y + i));
    same = _mm256_fmadd_pd(xv, yv, same);
    cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), cross);
  }
  cplx out(hsum(same), halt(cross));
  if (i < n) out += std::conj(x[i]) * y[i];
  return out;
}

void adjoint(std::size_t n, const cplx* y, cplx* out) {
  const __m256d conj_mask = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < n2; i += 2) {
    for (std::size_t j = 0; j < n2; j += 2) {
      const __m256d a0 = _mm256_loadu_pd(dp(y + i * n + j));
      const __m256d a1 = _mm256_loadu_pd(dp(y + (i + 1) * n + j));
      _mm256_storeu_pd(dp(out + j * n + i), _mm256_xor_pd(_mm256_permute2f128_pd(a0, a1, 0x20), conj_mask));
      _mm256_storeu_pd(dp(out + (j + 1) * n + i), _mm256_xor_pd(_mm256_permute2f128_pd(a0, a1, 0x31), conj_mask));
    }
  }
  if (n2 != n) {
    const std::size_t last = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      out[i * n + last] = std::conj(y[last * n + i]);
      out[last * n + i] = std::conj(y[i * n + last]);
    }
  }
}

void herm_sum(std::size_t n, const cplx* y, cplx* out) {
  // 2x2 complex tiles: rows (i, i+1) x columns (j, j+1) paired with the
  // mirrored tile; one 128-bit lane per complex entry.
  const __m256d conj_mask = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < n2; i += 2) {
    for (std::size_t j = i; j < n2; j += 2) {
      const __m256d a0 = _mm256_loadu_pd(dp(y + i * n + j));
      const __m256d a1 = _mm256_loadu_pd(dp(y + (i + 1) * n + j));
      const __m256d b0 = _mm256_loadu_pd(dp(y + j * n + i));
      const __m256d b1 = _mm256_loadu_pd(dp(y + (j + 1) * n + i));
      // transpose of the mirrored tile
      const __m256d bt0 = _mm256_permute2f128_pd(b0, b1, 0x20);
      const __m256d bt1 = _mm256_permute2f128_pd(b0, b1, 0x31);
      const __m256d v0 = _mm256_add_pd(a0, _mm256_xor_pd(bt0, conj_mask));
      const __m256d v1 = _mm256_add_pd(a1, _mm256_xor_pd(bt1, conj_mask));
      _mm256_storeu_pd(dp(out + i * n + j), v0);
      _mm256_storeu_pd(dp(out + (i + 1) * n + j), v1);
      if (j != i) {
        const __m256d c0 = _mm256_xor_pd(_mm256_permute2f128_pd(v0, v1, 0x20), conj_mask);
        const __m256d c1 = _mm256_xor_pd(_mm256_permute2f128_pd(v0, v1, 0x31), conj_mask);
        _mm256_storeu_pd(dp(out + j * n + i), c0);
        _mm256_storeu_pd(dp(out + (j + 1) * n + i), c1);
      }
    }
  }
  if (n2 != n) {
    const std::size_t last = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx v = y[i * n + last] + std::conj(y[last * n + i]);
      out[i * n + last] = v;
      out[last * n + i] = std::conj(v);
    }
  }
}

void gemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
  std::fill(c, c + n * n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    const cplx* arow = a + i * n;
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
      axpy2_impl(n, Bcast(arow[k]), b + k * n, Bcast(arow[k + 1]), b + (k + 1) * n, crow);
    }
    if (k < n) axpy_impl(n, Bcast(arow[k]), b + k * n, crow);
  }
}

void csrmm(std::size_t rows, std::size_t cols, const std::uint32_t* row_ptr,
           const std::uint32_t* col_idx, const cplx* vals, cplx alpha,
           const cplx* b, cplx* c, bool accumulate) {
  for (std::size_t i = 0; i < rows; ++i) {
    cplx* crow = c + i * cols;
    if (!accumulate) std::fill(crow, crow + cols, cplx{});
    std::uint32_t k = row_ptr[i];
    const std::uint32_t end = row_ptr[i + 1];
    for (; k + 2 <= end; k += 2) {
      axpy2_impl(cols, Bcast(alpha * vals[k]), b + std::size_t{col_idx[k]} * cols,
                 Bcast(alpha * vals[k + 1]), b + std::size_t{col_idx[k + 1]} * cols, crow);
    }
    if (k < end) axpy_impl(cols, Bcast(alpha * vals[k]), b + std::size_t{col_idx[k]} * cols, crow);
  }
}

}  // namespace optodark::kernels::avx2
