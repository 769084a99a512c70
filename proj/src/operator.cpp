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

#include "optodark/operator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "optodark/kernels.hpp"
#include "optodark/specfun.hpp"

namespace optodark {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void check_dim(std::size_t dim) {
  if (dim == 0 || dim > kMaxOperatorDim) {
    throw std::length_error("operator dimension " + std::to_string(dim) + " outside [1, " +
                            std::to_string(kMaxOperatorDim) + "]");
  }
}

}  // namespace

Operator::Operator(std::size_t dim) : dim_(dim) {
  check_dim(dim);
  entries_.assign(dim * dim, cplx{});
}

Operator::Operator(std::size_t dim, std::vector<cplx> entries) : dim_(dim), entries_(std::move(entries)) {
  check_dim(dim);
  if (entries_.size() != dim * dim) throw std::invalid_argument("Operator: entries length != dim^2");
}

Operator Operator::identity(std::size_t dim) {
  Operator m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Operator Operator::diagonal(std::span<const double> diag) {
  Operator m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Operator Operator::adjoint() const {
  Operator m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

Operator Operator::transpose() const {
  Operator m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

cplx Operator::trace() const {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double Operator::hermiticity_error() const {
  double err = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) {
      const double e = std::abs((*this)(i, j) - std::conj((*this)(j, i)));
      if (std::isnan(e)) return e;
      err = std::max(err, e);
    }
  return err;
}

double Operator::max_abs() const {
  double m = 0.0;
  for (const cplx& z : entries_) {
    const double a = std::abs(z);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

double Operator::norm() const {
  double s = 0.0;
  for (const cplx& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_dim(dim_, other.dim_, "operator+");
  kernels::active().axpy(entries_.size(), 1.0, other.data(), data());
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_dim(dim_, other.dim_, "operator-");
  kernels::active().axpy(entries_.size(), -1.0, other.data(), data());
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  for (cplx& z : entries_) z *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a.dim(), b.dim(), "operator*");
  Operator c(a.dim());
  kernels::active().gemm(a.dim(), a.data(), b.data(), c.data());
  return c;
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

SparseOperator::SparseOperator(const Operator& op) : SparseOperator(op, op) {}

SparseOperator::SparseOperator(const Operator& op, const Operator& pattern) : dim_(op.dim()) {
  require_same_dim(op.dim(), pattern.dim(), "SparseOperator");
  row_ptr_.reserve(dim_ + 1);
  row_ptr_.push_back(0);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      if (op(i, j) != cplx{} || pattern(i, j) != cplx{}) {
        col_idx_.push_back(static_cast<std::uint32_t>(j));
        values_.push_back(op(i, j));
      }
    }
    row_ptr_.push_back(static_cast<std::uint32_t>(values_.size()));
  }
  index_columns();
}

void SparseOperator::index_columns() {
  std::vector<int> per_column(dim_, 0);
  for (std::uint32_t c : col_idx_) ++per_column[c];
  single_per_column_.clear();
  if (std::any_of(per_column.begin(), per_column.end(), [](int n) { return n > 1; })) return;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::uint32_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      single_per_column_.push_back({static_cast<std::uint32_t>(i), col_idx_[k], values_[k]});
}

std::ptrdiff_t SparseOperator::find(std::size_t i, std::size_t j) const {
  if (i >= dim_) return -1;
  for (std::uint32_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (col_idx_[k] == j) return static_cast<std::ptrdiff_t>(k);
  return -1;
}

void SparseOperator::apply(const Operator& m, cplx alpha, Operator& out, bool accumulate) const {
  apply(values_, m, alpha, out, accumulate);
}

void SparseOperator::apply(std::span<const cplx> values, const Operator& m, cplx alpha, Operator& out,
                           bool accumulate) const {
  require_same_dim(dim_, m.dim(), "SparseOperator::apply");
  require_same_dim(dim_, out.dim(), "SparseOperator::apply");
  require_same_dim(values_.size(), values.size(), "SparseOperator::apply values");
  kernels::active().csrmm(dim_, dim_, row_ptr_.data(), col_idx_.data(), values.data(), alpha, m.data(),
                          out.data(), accumulate);
}

void SparseOperator::apply_right(const Operator& m, cplx alpha, Operator& out, bool accumulate) const {
  require_same_dim(dim_, m.dim(), "SparseOperator::apply_right");
  require_same_dim(dim_, out.dim(), "SparseOperator::apply_right");
  if (!accumulate) std::fill(out.entries().begin(), out.entries().end(), cplx{});
  if (!single_per_column_.empty()) {
    // out[i][j] += alpha * m[i][k_j] * s_j
    for (std::size_t i = 0; i < dim_; ++i) {
      const cplx* mrow = m.data() + i * dim_;
      cplx* orow = out.data() + i * dim_;
      for (const auto& e : single_per_column_) orow[e.col] += mrow[e.row] * (alpha * e.value);
    }
    return;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const cplx* mrow = m.data() + i * dim_;
    cplx* orow = out.data() + i * dim_;
    for (std::size_t k = 0; k < dim_; ++k) {
      const cplx mk = mrow[k];
      if (mk == cplx{}) continue;
      const cplx s = alpha * mk;
      for (std::uint32_t q = row_ptr_[k]; q < row_ptr_[k + 1]; ++q) orow[col_idx_[q]] += s * values_[q];
    }
  }
}

void add_adjoint(const Operator& y, Operator& out) {
  require_same_dim(y.dim(), out.dim(), "add_adjoint");
  kernels::active().herm_sum(y.dim(), y.data(), out.data());
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("Ket::basis: index >= dim");
  Ket k(dim);
  k[index] = 1.0;
  return k;
}

double Ket::norm() const {
  return std::sqrt(kernels::active().dotc(dim(), amplitudes_.data(), amplitudes_.data()).real());
}

Ket Ket::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("Ket::normalized: zero vector");
  Ket k(*this);
  for (cplx& z : k.amplitudes_) z /= n;
  return k;
}

cplx inner(const Ket& bra, const Ket& ket) {
  require_same_dim(bra.dim(), ket.dim(), "inner");
  return kernels::active().dotc(bra.dim(), bra.amplitudes().data(), ket.amplitudes().data());
}

Ket operator*(const Operator& op, const Ket& ket) {
  require_same_dim(op.dim(), ket.dim(), "Operator * Ket");
  Ket out(ket.dim());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < op.dim(); ++i) out[i] = k.dotu(op.dim(), op.row(i).data(), ket.amplitudes().data());
  return out;
}

DensityMatrix DensityMatrix::pure(const Ket& ket) {
  Operator m(ket.dim());
  for (std::size_t i = 0; i < ket.dim(); ++i)
    for (std::size_t j = 0; j < ket.dim(); ++j) m(i, j) = ket[i] * std::conj(ket[j]);
  return DensityMatrix(std::move(m));
}

double DensityMatrix::min_eigenvalue() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      h(i, j) = 0.5 * (op_(i, j) + std::conj(op_(j, i)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

Operator fock_annihilation(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("fock_annihilation: dim must be >= 2");
  Operator a(dim);
  for (std::size_t n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator number_operator(std::size_t dim) {
  std::vector<double> diag(dim);
  for (std::size_t n = 0; n < dim; ++n) diag[n] = static_cast<double>(n);
  return Operator::diagonal(diag);
}

Operator kron(const Operator& a, const Operator& b) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  if (db != 0 && da > kMaxOperatorDim / db) throw std::length_error("kron: product dimension overflow");
  Operator c(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) c(i * db + k, j * db + l) = aij * b(k, l);
    }
  return c;
}

Operator displacement_operator(std::size_t dim, double xi) {
  if (dim < 2) throw std::invalid_argument("displacement_operator: dim must be >= 2");
  if (dim > static_cast<std::size_t>(specfun::kMaxPhononIndex) + 1) {
    throw specfun::RangeError("displacement_operator: dim exceeds Franck-Condon range");
  }
  const specfun::FranckCondonTable table(xi, static_cast<int>(dim));
  Operator d(dim);
  for (std::size_t p = 0; p < dim; ++p)
    for (std::size_t q = 0; q < dim; ++q) d(p, q) = table(static_cast<int>(p), static_cast<int>(q));
  return d;
}

cplx expectation(const DensityMatrix& rho, const Operator& obs) {
  require_same_dim(rho.dim(), obs.dim(), "expectation");
  const Operator obs_t = obs.transpose();
  return kernels::active().dotu(rho.op().size(), rho.op().data(), obs_t.data());
}

}  // namespace optodark
