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

// Dense linear algebra on truncated Hilbert spaces.
//
// Product-space convention: the photon space is always the LEFT kron factor
// and the phonon space the RIGHT one, so the basis index of |n>_c |p>_M is
// n * n_phonon + p.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace optodark {

using cplx = std::complex<double>;

// Upper bound on the dimension of a single Operator.
inline constexpr std::size_t kMaxOperatorDim = 8192;

class Operator {
 public:
  Operator() = default;
  explicit Operator(std::size_t dim);
  Operator(std::size_t dim, std::vector<cplx> entries);

  static Operator identity(std::size_t dim);
  static Operator diagonal(std::span<const double> diag);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

  cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  std::span<cplx> entries() { return entries_; }
  std::span<const cplx> entries() const { return entries_; }
  std::span<const cplx> row(std::size_t i) const { return {entries_.data() + i * dim_, dim_}; }

  cplx* data() { return entries_.data(); }
  const cplx* data() const { return entries_.data(); }

  Operator adjoint() const;
  Operator transpose() const;
  cplx trace() const;

  // max_ij |M_ij - conj(M_ji)|; NaN if any entry is NaN.
  double hermiticity_error() const;
  bool is_hermitian(double tol) const { return hermiticity_error() <= tol; }

  // max_ij |M_ij|; NaN if any entry is NaN.
  double max_abs() const;
  // Frobenius norm.
  double norm() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

  friend bool operator==(const Operator&, const Operator&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> entries_;
};

Operator commutator(const Operator& a, const Operator& b);

// Row-compressed copy of an Operator, exact zeros dropped. Used where the
// operator is applied many times (the Lindblad right-hand side).
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(const Operator& op);
  // Stores every position where op or pattern is nonzero, with op's values;
  // lets callers overwrite the values of a fixed structure later.
  SparseOperator(const Operator& op, const Operator& pattern);

  std::size_t dim() const { return dim_; }
  std::size_t nonzeros() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }

  // Slot of (i, j) in values(), or -1 if the position is not stored.
  std::ptrdiff_t find(std::size_t i, std::size_t j) const;

  // out (+)= alpha * S * m
  void apply(const Operator& m, cplx alpha, Operator& out, bool accumulate) const;
  // Same with replacement values (same length as values()).
  void apply(std::span<const cplx> values, const Operator& m, cplx alpha, Operator& out, bool accumulate) const;

  // out (+)= alpha * m * S
  void apply_right(const Operator& m, cplx alpha, Operator& out, bool accumulate) const;

 private:
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    cplx value;
  };
  void index_columns();

  std::size_t dim_ = 0;
  // Filled when no column holds more than one entry (e.g. a^dag (x) I); lets
  // apply_right run as a gather.
  std::vector<Entry> single_per_column_;
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<cplx> values_;
};

// out = y + y^dag (exactly Hermitian); out must not alias y.
void add_adjoint(const Operator& y, Operator& out);

class Ket {
 public:
  Ket() = default;
  explicit Ket(std::size_t dim) : amplitudes_(dim) {}
  explicit Ket(std::vector<cplx> amplitudes) : amplitudes_(std::move(amplitudes)) {}

  static Ket basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amplitudes_.size(); }
  cplx& operator[](std::size_t i) { return amplitudes_[i]; }
  const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }

  double norm() const;
  Ket normalized() const;

 private:
  std::vector<cplx> amplitudes_;
};

cplx inner(const Ket& bra, const Ket& ket);
Ket operator*(const Operator& op, const Ket& ket);

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Operator op) : op_(std::move(op)) {}

  static DensityMatrix pure(const Ket& ket);

  std::size_t dim() const { return op_.dim(); }
  const Operator& op() const { return op_; }
  Operator& op() { return op_; }

  cplx trace() const { return op_.trace(); }
  double hermiticity_error() const { return op_.hermiticity_error(); }

  // Smallest eigenvalue of the Hermitian part (rho + rho^dag) / 2.
  double min_eigenvalue() const;

 private:
  Operator op_;
};

// Fock-space annihilation operator truncated to dim levels.
Operator fock_annihilation(std::size_t dim);
Operator number_operator(std::size_t dim);

Operator kron(const Operator& a, const Operator& b);

// Truncated D(xi) assembled from Franck-Condon elements (no matrix
// exponential); unitary only on the block well below the truncation.
Operator displacement_operator(std::size_t dim, double xi);

// Tr(rho * obs).
cplx expectation(const DensityMatrix& rho, const Operator& obs);

}  // namespace optodark
