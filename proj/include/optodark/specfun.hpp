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

// Special functions for displaced harmonic oscillators.
//
// The matrix element <p|D(xi)|p'> of the displacement operator
// D(xi) = exp[xi (b^dag - b)] with real xi is
//
//   sqrt(p!/p'!) e^{-xi^2/2} (-xi)^{p'-p} L_p^{p'-p}(xi^2),  p <= p'
//   sqrt(p'!/p!) e^{-xi^2/2} ( xi)^{p-p'} L_{p'}^{p-p'}(xi^2), p >  p'
//
// and the photon annihilation operator expressed in the displaced-oscillator
// eigenbasis picks up an extra sqrt(n).

#include <span>
#include <stdexcept>
#include <vector>

namespace optodark::specfun {

// Largest phonon index accepted by the Franck-Condon routines.
inline constexpr int kMaxPhononIndex = 512;

// Raised when an index exceeds kMaxPhononIndex.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Associated Laguerre polynomial L_n^k(x), by upward three-term recurrence
// in n. Exact for n = 0 and n = 1.
double laguerre(int n, int k, double x);

// ln(n!) for 0 <= n <= 2 * kMaxPhononIndex + 1.
double log_factorial(int n);

// <p|D(xi)|p2>. Requires xi >= 0.
double displacement_element(int p, int p2, double xi);

// A^{(n)}_{p,p2} = sqrt(n) <p|D(xi)|p2>. Throws std::invalid_argument for n < 1.
double coupling_coefficient(int n, int p, int p2, double xi);

// Dense dim x dim table of <p|D(xi)|p'>, row-major.
class FranckCondonTable {
 public:
  FranckCondonTable(double xi, int dim);

  double operator()(int p, int p2) const { return entries_[static_cast<std::size_t>(p) * dim_ + p2]; }
  double xi() const { return xi_; }
  int dim() const { return dim_; }
  std::span<const double> entries() const { return entries_; }

  // sum_p W[p][col]^2; approaches 1 from below as dim grows.
  double column_norm_sq(int col) const;

 private:
  double xi_;
  int dim_;
  std::vector<double> entries_;
};

}  // namespace optodark::specfun
