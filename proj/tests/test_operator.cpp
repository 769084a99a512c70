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

#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "optodark/operator.hpp"
#include "optodark/specfun.hpp"

using namespace optodark;

namespace {

Operator random_operator(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Operator m(dim);
  for (cplx& z : m.entries()) z = {d(rng), d(rng)};
  return m;
}

double max_diff(const Operator& a, const Operator& b) { return (a - b).max_abs(); }

Operator naive_product(const Operator& a, const Operator& b) {
  Operator c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      for (std::size_t k = 0; k < a.dim(); ++k) c(i, j) += a(i, k) * b(k, j);
    }
  }
  return c;
}

}  // namespace

TEST_CASE("fock operators") {
  const Operator a2 = fock_annihilation(2);
  CHECK(a2(0, 1) == cplx(1.0));
  CHECK(a2(0, 0) == cplx(0.0));
  CHECK(a2(1, 0) == cplx(0.0));
  CHECK(a2(1, 1) == cplx(0.0));
  CHECK(fock_annihilation(3)(1, 2) == cplx(std::sqrt(2.0)));
  const Operator a4 = fock_annihilation(4);
  const Operator n4 = a4.adjoint() * a4;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(n4(i, j) - cplx(i == j ? double(i) : 0.0)) < 1e-15);
  }
  CHECK(max_diff(n4, number_operator(4)) < 1e-15);
  CHECK_THROWS_AS(fock_annihilation(1), std::invalid_argument);

  // [a, a^dag] = I except in the last row.
  const std::size_t d = 9;
  const Operator a = fock_annihilation(d);
  const Operator c = commutator(a, a.adjoint());
  for (std::size_t i = 0; i + 1 < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(c(i, j) - cplx(i == j ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("kron identities") {
  CHECK(kron(Operator::identity(2), Operator::identity(3)) == Operator::identity(6));
  const std::vector<double> d01{0.0, 1.0};
  const std::vector<double> d0011{0.0, 0.0, 1.0, 1.0};
  CHECK(kron(Operator::diagonal(d01), Operator::identity(2)) == Operator::diagonal(d0011));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    const std::size_t m = dim(rng), n = dim(rng), k = dim(rng);
    const Operator A = random_operator(m, rng), C = random_operator(m, rng);
    const Operator B = random_operator(n, rng), D = random_operator(n, rng);
    const Operator E = random_operator(k, rng);
    CHECK(max_diff(kron(A, B) * kron(C, D), kron(A * C, B * D)) < 1e-12);
    CHECK(max_diff(kron(kron(A, B), E), kron(A, kron(B, E))) < 1e-12);
    CHECK(std::abs(kron(A, B).trace() - A.trace() * B.trace()) < 1e-12);
  }
  CHECK_THROWS(kron(Operator(kMaxOperatorDim), Operator(2)));
}

TEST_CASE("operator arithmetic") {
  std::mt19937_64 rng(3);
  const Operator A = random_operator(13, rng);
  const Operator B = random_operator(13, rng);
  CHECK(A.adjoint().adjoint() == A);
  CHECK(A.transpose().transpose() == A);
  CHECK(max_diff(A * B, naive_product(A, B)) < 1e-12);
  CHECK(max_diff((A + B) - B, A) < 1e-14);
  CHECK(max_diff(A * cplx(2.0) - A - A, Operator(13)) < 1e-14);
  const Operator H = A + A.adjoint();
  CHECK(H.is_hermitian(0.0));
  CHECK_FALSE(A.is_hermitian(1e-3));
  CHECK(Operator::identity(5).norm() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("sparse operator matches dense products") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  Operator S = random_operator(17, rng);
  for (cplx& z : S.entries()) {
    if (u(rng) < 0.7) z = 0.0;
  }
  const Operator M = random_operator(17, rng);
  const SparseOperator sp(S);
  Operator out(17);
  sp.apply(M, cplx(0.0, -1.0), out, false);
  CHECK(max_diff(out, S * M * cplx(0.0, -1.0)) < 1e-12);
  sp.apply(M, 1.0, out, true);
  CHECK(max_diff(out, S * M * cplx(1.0, -1.0)) < 1e-12);
  sp.apply_right(M, 2.0, out, false);
  CHECK(max_diff(out, M * S * cplx(2.0)) < 1e-12);

  // Single entry per column: the gather path.
  const Operator R = kron(fock_annihilation(3).adjoint(), Operator::identity(5));
  const Operator M2 = random_operator(15, rng);
  Operator out2(15);
  SparseOperator(R).apply_right(M2, cplx(0.5, 0.5), out2, false);
  CHECK(max_diff(out2, M2 * R * cplx(0.5, 0.5)) < 1e-13);

  Operator pattern(17);
  pattern(3, 4) = 1.0;
  const SparseOperator sp2(S, pattern);
  CHECK(sp2.find(3, 4) >= 0);
  CHECK(sp2.find(16, 16) == (S(16, 16) != cplx(0.0) ? sp2.find(16, 16) : -1));

  Operator sum(17);
  add_adjoint(M, sum);
  CHECK(max_diff(sum, M + M.adjoint()) < 1e-15);
  CHECK(sum.is_hermitian(0.0));
}

TEST_CASE("displacement operator") {
  CHECK(displacement_operator(6, 0.0) == Operator::identity(6));

  const double xi = 0.8;
  const std::size_t dim = 40;
  const Operator D = displacement_operator(dim, xi);
  const Operator DDdag = D * D.adjoint();
  double worst = 0.0;
  for (std::size_t i = 0; i < dim / 2; ++i) {
    for (std::size_t j = 0; j < dim / 2; ++j) worst = std::max(worst, std::abs(DDdag(i, j) - cplx(i == j ? 1.0 : 0.0)));
  }
  CHECK(worst < 1e-8);

  // Independent oracle: matrix exponential of xi (b^dag - b) on a much
  // larger space, compared on the low block.
  const int big = 140;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(big, big);
  for (int p = 1; p < big; ++p) {
    gen(p, p - 1) = xi * std::sqrt(double(p));
    gen(p - 1, p) = -xi * std::sqrt(double(p));
  }
  const Eigen::MatrixXd expo = gen.exp();
  double oracle_err = 0.0;
  for (int p = 0; p < 25; ++p) {
    for (int q = 0; q < 25; ++q) oracle_err = std::max(oracle_err, std::abs(D(p, q).real() - expo(p, q)));
  }
  CHECK(oracle_err < 1e-10);

  CHECK_THROWS_AS(displacement_operator(specfun::kMaxPhononIndex + 2, 0.3), specfun::RangeError);
}

TEST_CASE("states and expectations") {
  const std::size_t d = 4;
  const DensityMatrix vac = DensityMatrix::pure(Ket::basis(d, 0));
  CHECK(expectation(vac, number_operator(d)) == cplx(0.0));
  Operator mixed = Operator::identity(d) * cplx(1.0 / d);
  CHECK(std::abs(expectation(DensityMatrix(mixed), Operator::identity(d)) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(expectation(DensityMatrix::pure(Ket::basis(d, 1)), number_operator(d)) - cplx(1.0)) < 1e-15);

  Ket k(std::vector<cplx>{{1.0, 1.0}, {2.0, 0.0}, {0.0, -3.0}});
  CHECK(std::abs(k.normalized().norm() - 1.0) < 1e-15);
  CHECK(std::abs(inner(k, k) - cplx(15.0)) < 1e-14);
  const Ket shifted = fock_annihilation(3).adjoint() * k;
  CHECK(shifted[0] == cplx(0.0));
  CHECK(shifted[1] == k[0]);

  const std::vector<double> diag{0.5, 0.7, -0.2};
  CHECK(DensityMatrix(Operator::diagonal(diag)).min_eigenvalue() == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(vac.min_eigenvalue() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS(expectation(vac, Operator::identity(3)));
}
