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

// Magic couplings g_N and the analytic dark states of the rotating-wave model.
//
// With xi = g_N, the coupling A^{(1)}_{N,N} vanishes and the rotating-wave
// Hamiltonian has the zero-energy eigenvector
//
//   |D> = C sum_{p=0}^{N} beta_p |p>_M |0>_c,
//   beta_0 = 1,  beta_{p+1} = -r A^{(1)}_{p,p} / A^{(1)}_{p+1,p} beta_p,
//
// where r = Omega_1 / Omega_2.

#include <optional>
#include <string>
#include <vector>

#include "optodark/operator.hpp"

namespace optodark {

inline constexpr int kMaxMagicIndex = 200;

// Smallest g > 0 with L_N(g^2) = 0, i.e. A^{(1)}_{N,N}(g) = 0.
// Throws std::out_of_range outside 1 <= n <= kMaxMagicIndex.
double find_gn(int n);

// Omega_1 / Omega_2 is the native convention; the other is accepted at the
// user-facing edges and converted immediately.
enum class RatioConvention { omega1_over_omega2, omega2_over_omega1 };

double to_omega1_over_omega2(double ratio, RatioConvention convention);
std::optional<RatioConvention> parse_ratio_convention(const std::string& text);

struct DarkState {
  int n_max = 0;
  double xi = 0.0;
  double ratio = 0.0;  // Omega_1 / Omega_2
  std::vector<double> beta;
  double norm_c = 1.0;

  // ln|beta_p| and sign(beta_p); the populations are formed from these so
  // that they stay finite even when beta itself over- or underflows.
  std::vector<double> log_abs_beta;
  std::vector<int> sign_beta;

  // P(p) = C^2 beta_p^2, p = 0..n_max.
  std::vector<double> populations() const;
  // C beta_p, p = 0..n_max.
  std::vector<double> amplitudes() const;

  // |0>_c (x) sum_p C beta_p |p>_M on the full space.
  Ket embed(int n_photon_levels, int n_phonon_levels) const;
};

// Raised when A^{(1)}_{i+1,i} underflows to zero and beta cannot be formed.
class DarkStateError : public std::runtime_error {
 public:
  DarkStateError(const std::string& what, int index) : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

DarkState dark_state(int n_max, double xi, double ratio);

struct PhononStatistics {
  double mean = 0.0;
  double variance = 0.0;
  // Unset when mean < 1e-14 (the ratio -> 0 limit, where it is 0/0).
  std::optional<double> fano;
};

PhononStatistics phonon_statistics(const DarkState& ds);

// || H' |D> || with H' the rotating-wave Hamiltonian at (omega1_amp,
// omega2_amp). Throws std::invalid_argument if their ratio is not ds.ratio.
double nullity_check(const DarkState& ds, double omega1_amp, double omega2_amp);

}  // namespace optodark
