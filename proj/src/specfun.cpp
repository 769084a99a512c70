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

#include "optodark/specfun.hpp"

#include <array>
#include <cmath>
#include <string>

namespace optodark::specfun {

namespace {

constexpr int kLogFactorialSize = 2 * kMaxPhononIndex + 2;

const std::array<double, kLogFactorialSize>& log_factorial_table() {
  static const auto table = [] {
    std::array<double, kLogFactorialSize> t{};
    t[0] = 0.0;
    t[1] = 0.0;
    for (int n = 2; n < kLogFactorialSize; ++n) t[n] = std::lgamma(static_cast<double>(n) + 1.0);
    return t;
  }();
  return table;
}

void check_index(int p, const char* what) {
  if (p < 0 || p > kMaxPhononIndex) {
    throw RangeError(std::string(what) + " = " + std::to_string(p) + " outside [0, " +
                     std::to_string(kMaxPhononIndex) + "]");
  }
}

}  // namespace

double laguerre(int n, int k, double x) {
  if (n < 0 || k < 0) throw std::domain_error("laguerre: negative degree or order");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + k - x;
  for (int m = 1; m < n; ++m) {
    const double next = ((2.0 * m + 1.0 + k - x) * cur - (m + k) * prev) / (m + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double log_factorial(int n) {
  if (n < 0 || n >= kLogFactorialSize) {
    throw RangeError("log_factorial: n = " + std::to_string(n) + " out of table range");
  }
  return log_factorial_table()[n];
}

double displacement_element(int p, int p2, double xi) {
  check_index(p, "p");
  check_index(p2, "p'");
  if (!(xi >= 0.0)) throw std::domain_error("displacement_element: xi must be >= 0");

  const int lo = p < p2 ? p : p2;
  const int hi = p < p2 ? p2 : p;
  const int d = hi - lo;
  if (xi == 0.0) return d == 0 ? 1.0 : 0.0;

  const double x = xi * xi;
  const double log_mag = 0.5 * (log_factorial(lo) - log_factorial(hi)) - 0.5 * x + d * std::log(xi);
  const double value = std::exp(log_mag) * laguerre(lo, d, x);
  // (-xi)^d on the p < p' branch
  return (p < p2 && (d & 1)) ? -value : value;
}

double coupling_coefficient(int n, int p, int p2, double xi) {
  if (n < 1) throw std::invalid_argument("coupling_coefficient: n must be >= 1");
  return std::sqrt(static_cast<double>(n)) * displacement_element(p, p2, xi);
}

FranckCondonTable::FranckCondonTable(double xi, int dim) : xi_(xi), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("FranckCondonTable: dim must be >= 1");
  check_index(dim - 1, "dim - 1");
  entries_.resize(static_cast<std::size_t>(dim) * dim);
  for (int p = 0; p < dim; ++p) {
    for (int q = p; q < dim; ++q) {
      const double w = displacement_element(p, q, xi);
      entries_[static_cast<std::size_t>(p) * dim + q] = w;
      entries_[static_cast<std::size_t>(q) * dim + p] = ((q - p) & 1) ? -w : w;
    }
  }
}

double FranckCondonTable::column_norm_sq(int col) const {
  double s = 0.0;
  for (int p = 0; p < dim_; ++p) s += (*this)(p, col) * (*this)(p, col);
  return s;
}

}  // namespace optodark::specfun
