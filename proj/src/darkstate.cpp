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

#include "optodark/darkstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "optodark/model.hpp"
#include "optodark/specfun.hpp"

namespace optodark {

namespace {

// First zero of J_0, squared.
constexpr double kJ01Squared = 5.783185962946784;

double lse(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double find_gn(int n) {
  if (n < 1 || n > kMaxMagicIndex) {
    throw std::out_of_range("find_gn: N = " + std::to_string(n) + " outside [1, " +
                            std::to_string(kMaxMagicIndex) + "]");
  }
  auto f = [n](double x) { return specfun::laguerre(n, 0, x); };

  const double x_est = kJ01Squared / (4.0 * n + 2.0);
  const double step = x_est / 20.0;
  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= 400; ++i) {
    hi = i * step;
    const double fh = f(hi);
    if (fh == 0.0) return std::sqrt(hi);
    if (fh < 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) throw std::logic_error("find_gn: failed to bracket the first Laguerre zero");

  // f(lo) > 0 > f(hi); bisect until the interval cannot shrink.
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return std::sqrt(mid);
    (fm > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi);
}

double to_omega1_over_omega2(double ratio, RatioConvention convention) {
  if (convention == RatioConvention::omega1_over_omega2) return ratio;
  if (ratio == 0.0) throw std::invalid_argument("Omega2/Omega1 = 0 has no finite Omega1/Omega2");
  return 1.0 / ratio;
}

std::optional<RatioConvention> parse_ratio_convention(const std::string& text) {
  if (text == "1/2") return RatioConvention::omega1_over_omega2;
  if (text == "2/1") return RatioConvention::omega2_over_omega1;
  return std::nullopt;
}

std::vector<double> DarkState::populations() const {
  std::vector<double> twice(log_abs_beta.size());
  for (std::size_t p = 0; p < twice.size(); ++p) twice[p] = 2.0 * log_abs_beta[p];
  const double total = lse(twice);
  std::vector<double> out(twice.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::exp(twice[p] - total);
  return out;
}

std::vector<double> DarkState::amplitudes() const {
  const auto pop = populations();
  std::vector<double> out(pop.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = sign_beta[p] * std::sqrt(pop[p]);
  return out;
}

Ket DarkState::embed(int n_photon_levels, int n_phonon_levels) const {
  const auto amp = amplitudes();
  return embed_effective_state(amp, n_photon_levels, n_phonon_levels);
}

DarkState dark_state(int n_max, double xi, double ratio) {
  if (n_max < 1) throw std::invalid_argument("dark_state: N must be >= 1");
  if (n_max > specfun::kMaxPhononIndex - 1) throw specfun::RangeError("dark_state: N exceeds Franck-Condon range");
  if (!(xi > 0.0)) throw std::invalid_argument("dark_state: xi must be > 0");
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("dark_state: ratio must be finite and >= 0");

  DarkState ds;
  ds.n_max = n_max;
  ds.xi = xi;
  ds.ratio = ratio;
  ds.log_abs_beta.assign(n_max + 1, -std::numeric_limits<double>::infinity());
  ds.sign_beta.assign(n_max + 1, 0);
  ds.log_abs_beta[0] = 0.0;
  ds.sign_beta[0] = 1;

  const double log_ratio = std::log(ratio);  // -inf for ratio == 0
  for (int i = 0; i < n_max; ++i) {
    const double diag = specfun::coupling_coefficient(1, i, i, xi);
    const double side = specfun::coupling_coefficient(1, i + 1, i, xi);
    if (side == 0.0 || !std::isfinite(side)) {
      throw DarkStateError("dark_state: A(1)_{i+1,i} vanishes at i = " + std::to_string(i), i);
    }
    if (ds.sign_beta[i] == 0 || diag == 0.0 || ratio == 0.0) {
      // the chain is cut here; everything above stays zero
      break;
    }
    ds.log_abs_beta[i + 1] = ds.log_abs_beta[i] + log_ratio + std::log(std::abs(diag)) - std::log(std::abs(side));
    const int s = (diag > 0.0) == (side > 0.0) ? 1 : -1;
    ds.sign_beta[i + 1] = -ds.sign_beta[i] * s;
  }

  ds.beta.resize(n_max + 1);
  for (int p = 0; p <= n_max; ++p) ds.beta[p] = ds.sign_beta[p] * std::exp(ds.log_abs_beta[p]);

  std::vector<double> twice(ds.log_abs_beta);
  for (double& v : twice) v *= 2.0;
  ds.norm_c = std::exp(-0.5 * lse(twice));
  return ds;
}

PhononStatistics phonon_statistics(const DarkState& ds) {
  const auto pop = ds.populations();
  PhononStatistics st;
  double second = 0.0;
  for (std::size_t p = 0; p < pop.size(); ++p) {
    st.mean += static_cast<double>(p) * pop[p];
    second += static_cast<double>(p * p) * pop[p];
  }
  st.variance = std::max(0.0, second - st.mean * st.mean);
  if (st.mean >= 1e-14) st.fano = st.variance / st.mean;
  return st;
}

double nullity_check(const DarkState& ds, double omega1_amp, double omega2_amp) {
  if (!(omega2_amp > 0.0)) throw std::invalid_argument("nullity_check: omega2_amp must be > 0");
  const double r = omega1_amp / omega2_amp;
  if (std::abs(r - ds.ratio) > 1e-12 * std::max(1.0, ds.ratio)) {
    throw std::invalid_argument("nullity_check: Omega1/Omega2 does not match the dark state's ratio");
  }
  const Operator h = build_effective_hamiltonian(ds.n_max, ds.xi, omega1_amp, omega2_amp);
  const auto amp = ds.amplitudes();
  Ket d(h.dim());
  for (std::size_t p = 0; p < amp.size(); ++p) d[p] = amp[p];
  return (h * d).norm();
}

}  // namespace optodark
