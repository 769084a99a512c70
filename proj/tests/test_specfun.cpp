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

#include <boost/multiprecision/cpp_int.hpp>

#include "optodark/darkstate.hpp"
#include "optodark/specfun.hpp"

using namespace optodark;
using namespace optodark::specfun;
using boost::multiprecision::cpp_rational;

namespace {

// L_n^k(x) = sum_i (-1)^i C(n+k, n-i) x^i / i!, summed exactly.
cpp_rational laguerre_exact(int n, int k, const cpp_rational& x) {
  cpp_rational sum = 0;
  cpp_rational power = 1;
  cpp_rational fact = 1;
  for (int i = 0; i <= n; ++i) {
    cpp_rational binom = 1;
    for (int j = 1; j <= n - i; ++j) binom = binom * (k + i + j) / j;
    cpp_rational term = binom * power / fact;
    sum += (i % 2 == 0) ? term : cpp_rational(-term);
    power *= x;
    fact *= i + 1;
  }
  return sum;
}

}  // namespace

TEST_CASE("laguerre closed forms") {
  CHECK(laguerre(0, 5, 7.3) == 1.0);
  CHECK(laguerre(1, 0, 1.0) == 0.0);
  CHECK(std::abs(laguerre(2, 0, 2.0 - std::sqrt(2.0))) < 1e-12);
  CHECK(laguerre(3, 2, 0.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(laguerre(-1, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(laguerre(1, -1, 1.0), std::domain_error);
}

TEST_CASE("laguerre recurrence matches exact rational series") {
  // Points are multiples of 1/8 so they are exact in both representations.
  // Near a zero the recurrence carries absolute error of order eps times the
  // largest partial value, so the bound is relative to max(|L|, that scale).
  double worst = 0.0;
  for (int n = 0; n <= 30; ++n) {
    for (int k = 0; k <= 10; ++k) {
      for (int j = 0; j <= 200; j += 3) {
        const cpp_rational xr(j, 8);
        const double x = j / 8.0;
        const double exact = static_cast<double>(laguerre_exact(n, k, xr));
        double scale = 1.0;
        for (int m = 0; m <= n; ++m) scale = std::max(scale, std::abs(static_cast<double>(laguerre_exact(m, k, xr))));
        const double err = std::abs(laguerre(n, k, x) - exact) / std::max(std::abs(exact), scale);
        worst = std::max(worst, err);
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("log_factorial") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-13));
  CHECK(log_factorial(170) == doctest::Approx(std::lgamma(171.0)).epsilon(1e-13));
}

TEST_CASE("displacement element closed forms") {
  for (double xi : {0.1, 0.37, 0.9, 1.5}) {
    const double e = std::exp(-xi * xi / 2);
    CHECK(displacement_element(0, 0, xi) == doctest::Approx(e).epsilon(1e-15));
    CHECK(displacement_element(0, 1, xi) == doctest::Approx(-xi * e).epsilon(1e-14));
    CHECK(displacement_element(1, 0, xi) == doctest::Approx(xi * e).epsilon(1e-14));
    // Column 0 is a coherent state.
    for (int p = 0; p < 12; ++p) {
      const double coherent = e * std::pow(xi, p) / std::sqrt(std::tgamma(p + 1.0));
      CHECK(displacement_element(p, 0, xi) == doctest::Approx(coherent).epsilon(1e-12));
    }
  }
  for (int p = 0; p < 6; ++p) {
    for (int q = 0; q < 6; ++q) CHECK(displacement_element(p, q, 0.0) == (p == q ? 1.0 : 0.0));
  }
  CHECK_THROWS_AS(displacement_element(kMaxPhononIndex + 1, 0, 0.3), RangeError);
  CHECK_THROWS_AS(displacement_element(0, 0, -0.1), std::domain_error);
}

TEST_CASE("coupling coefficient") {
  const double xi = 0.53;
  CHECK(coupling_coefficient(1, 0, 0, xi) == doctest::Approx(std::exp(-xi * xi / 2)).epsilon(1e-15));
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) CHECK(coupling_coefficient(4, p, q, xi) == 2.0 * displacement_element(p, q, xi));
  }
  CHECK_THROWS_AS(coupling_coefficient(0, 0, 0, xi), std::invalid_argument);
  for (int n : {1, 2, 3, 10, 40}) {
    const double g = find_gn(n);
    CHECK(std::abs(coupling_coefficient(1, n, n, g)) < 1e-9);
  }
}

TEST_CASE("Franck-Condon table") {
  const FranckCondonTable t(0.6, 40);
  CHECK(t(0, 0) == std::exp(-0.18));
  for (int p = 0; p < 40; ++p) {
    for (int q = 0; q < 40; ++q) {
      const double sign = ((p - q) % 2 == 0) ? 1.0 : -1.0;
      CHECK(t(q, p) == sign * t(p, q));
      CHECK(t(p, q) == displacement_element(p, q, 0.6));
    }
  }
  for (int col : {0, 3, 8}) {
    double previous = 1.0;
    for (int dim = col + 2; dim <= 60; dim += 2) {
      const double defect = 1.0 - FranckCondonTable(0.9, dim).column_norm_sq(col);
      CHECK(defect >= -1e-15);
      CHECK(defect <= previous);
      previous = defect;
    }
    CHECK(previous < 1e-12);
  }
  CHECK_THROWS_AS(FranckCondonTable(0.3, kMaxPhononIndex + 2), RangeError);
}
