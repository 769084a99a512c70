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

// Two-tone driven optomechanical cavity in the frame rotating at the cavity
// frequency, with omega_M = 1:
//
//   H_r(t) = b^dag b - g a^dag a (b^dag + b)
//            + [(O1 e^{-i D1 t} + O2 e^{-i D2 t}) a^dag + h.c.]
//
// The drive-free part is diagonal in the displaced basis
// |psi_{n,p}> = |n>_c D(n g)|p>_M with energies eps_{n,p} = p - n^2 g^2.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "optodark/operator.hpp"

namespace optodark {

struct ModelParams {
  double g = 0.0;
  double omega1_amp = 0.0;
  double omega2_amp = 0.0;
  double delta1 = 0.0;
  double delta2 = -1.0;
  double gamma_c = 0.0;
  double gamma_m = 0.0;
  int n_photon_levels = 3;
  int n_phonon_levels = 2;

  std::size_t dim() const {
    return static_cast<std::size_t>(n_photon_levels) * static_cast<std::size_t>(n_phonon_levels);
  }
  std::size_t index(int photon, int phonon) const {
    return static_cast<std::size_t>(photon) * n_phonon_levels + phonon;
  }

  // Empty when valid, otherwise one message per violated invariant.
  std::vector<std::string> problems() const;
  // Throws std::invalid_argument listing problems().
  void validate() const;
};

// Ground manifold |psi_{0,p}>, p = 0..N, followed by |psi_{1,p}>, p = 0..N-1.
struct EffectiveSpace {
  int n_max = 1;

  std::size_t dim() const { return 2 * static_cast<std::size_t>(n_max) + 1; }
  std::size_t ground(int p) const { return static_cast<std::size_t>(p); }
  std::size_t excited(int p) const { return static_cast<std::size_t>(n_max) + 1 + p; }
};

struct Detunings {
  double delta1;
  double delta2;
};

struct BlockadeMargin {
  long k;
  double margin;
};

double eigenenergy(int n, int p, double g);

// Detunings that make both tones resonant with 0 -> 1 photon transitions.
Detunings resonance_detunings(double g);

// K = nearest integer to 2 g^2, margin = |2 g^2 - K|. Drive amplitudes must
// be small against the margin; margin == 0 means the effective model is
// not valid at all.
BlockadeMargin blockade_margin(double g);

// Phonon truncation used when a run does not specify one.
int default_phonon_levels(int n_max);

// O1 e^{-i D1 t} + O2 e^{-i D2 t}
cplx drive_amplitude(const ModelParams& params, double t);

// H_r(t) with the drive-free part built once.
class FullHamiltonian {
 public:
  explicit FullHamiltonian(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  // b^dag b - g a^dag a (b^dag + b)
  const Operator& static_part() const { return static_; }
  // a^dag (x) I; the drive is f(t) * raise + conj(f(t)) * raise^dag.
  const Operator& raise() const { return raise_; }
  const Operator& lower() const { return lower_; }

  Operator at(double t) const;

 private:
  ModelParams params_;
  Operator static_;
  Operator raise_;
  Operator lower_;
};

Operator build_full_hamiltonian(const ModelParams& params, double t);

// Rotating-wave Hamiltonian on EffectiveSpace{n_max}.
Operator build_effective_hamiltonian(int n_max, double xi, double omega1_amp, double omega2_amp);

// The same rotating-wave Hamiltonian written on the full photon (x) phonon
// space, with |psi_{1,p}> = |1>_c D(xi)|p>_M taken from the truncated
// displacement operator.
Operator embed_effective_hamiltonian(int n_max, double xi, double omega1_amp, double omega2_amp,
                                     int n_photon_levels, int n_phonon_levels);

// sum_p amplitudes[p] |0>_c |p>_M; amplitudes has n_max + 1 entries (or any
// length up to n_phonon_levels).
Ket embed_effective_state(std::span<const double> amplitudes, int n_photon_levels, int n_phonon_levels);

}  // namespace optodark
