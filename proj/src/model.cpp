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

#include "optodark/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "optodark/specfun.hpp"

namespace optodark {

std::vector<std::string> ModelParams::problems() const {
  std::vector<std::string> out;
  auto finite_nonneg = [&](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) out.push_back(std::string(name) + " must be finite and >= 0");
  };
  finite_nonneg(g, "g");
  finite_nonneg(omega1_amp, "omega1_amp");
  finite_nonneg(omega2_amp, "omega2_amp");
  finite_nonneg(gamma_c, "gamma_c");
  finite_nonneg(gamma_m, "gamma_m");
  if (!std::isfinite(delta1)) out.emplace_back("delta1 must be finite");
  if (!std::isfinite(delta2)) out.emplace_back("delta2 must be finite");
  if (n_photon_levels < 2) out.emplace_back("n_photon_levels must be >= 2");
  if (n_phonon_levels < 2) out.emplace_back("n_phonon_levels must be >= 2");
  if (n_phonon_levels > specfun::kMaxPhononIndex + 1) out.emplace_back("n_phonon_levels exceeds Franck-Condon range");
  if (n_photon_levels >= 2 && n_phonon_levels >= 2 && dim() > kMaxOperatorDim) {
    out.emplace_back("product dimension too large");
  }
  return out;
}

void ModelParams::validate() const {
  const auto p = problems();
  if (p.empty()) return;
  std::string msg = "invalid model parameters:";
  for (const auto& s : p) msg += " " + s + ";";
  throw std::invalid_argument(msg);
}

double eigenenergy(int n, int p, double g) { return p - static_cast<double>(n) * n * g * g; }

Detunings resonance_detunings(double g) {
  return {eigenenergy(1, 0, g) - eigenenergy(0, 0, g), eigenenergy(1, 0, g) - eigenenergy(0, 1, g)};
}

BlockadeMargin blockade_margin(double g) {
  const double two_g2 = 2.0 * g * g;
  const long k = std::lround(two_g2);
  return {k, std::abs(two_g2 - static_cast<double>(k))};
}

int default_phonon_levels(int n_max) {
  return std::max(n_max + 15, static_cast<int>(std::ceil(2.0 * n_max)));
}

cplx drive_amplitude(const ModelParams& params, double t) {
  return params.omega1_amp * std::polar(1.0, -params.delta1 * t) +
         params.omega2_amp * std::polar(1.0, -params.delta2 * t);
}

FullHamiltonian::FullHamiltonian(const ModelParams& params) : params_(params) {
  params.validate();
  const auto nc = static_cast<std::size_t>(params.n_photon_levels);
  const auto nm = static_cast<std::size_t>(params.n_phonon_levels);
  const Operator a = fock_annihilation(nc);
  const Operator b = fock_annihilation(nm);
  const Operator ic = Operator::identity(nc);
  const Operator im = Operator::identity(nm);

  static_ = kron(ic, number_operator(nm)) -
            cplx(params.g) * kron(number_operator(nc), b + b.adjoint());
  lower_ = kron(a, im);
  raise_ = lower_.adjoint();
}

Operator FullHamiltonian::at(double t) const {
  const cplx f = drive_amplitude(params_, t);
  Operator h = static_;
  const std::size_t d = h.dim();
  // raise_ has one nonzero per row at most; touch only those.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const cplx r = raise_(i, j);
      if (r == cplx{}) continue;
      h(i, j) += f * r;
      h(j, i) += std::conj(f * r);
    }
  return h;
}

Operator build_full_hamiltonian(const ModelParams& params, double t) { return FullHamiltonian(params).at(t); }

namespace {

void check_effective_args(int n_max, double xi) {
  if (n_max < 1) throw std::invalid_argument("effective Hamiltonian: N must be >= 1");
  if (!(xi > 0.0)) throw std::invalid_argument("effective Hamiltonian: xi must be > 0");
  if (n_max > specfun::kMaxPhononIndex) throw specfun::RangeError("effective Hamiltonian: N exceeds Franck-Condon range");
}

}  // namespace

Operator build_effective_hamiltonian(int n_max, double xi, double omega1_amp, double omega2_amp) {
  check_effective_args(n_max, xi);
  const EffectiveSpace space{n_max};
  Operator h(space.dim());
  for (int p = 0; p < n_max; ++p) {
    const double c1 = specfun::coupling_coefficient(1, p, p, xi) * omega1_amp;
    const double c2 = specfun::coupling_coefficient(1, p + 1, p, xi) * omega2_amp;
    h(space.excited(p), space.ground(p)) = c1;
    h(space.ground(p), space.excited(p)) = c1;
    h(space.excited(p), space.ground(p + 1)) = c2;
    h(space.ground(p + 1), space.excited(p)) = c2;
  }
  return h;
}

Operator embed_effective_hamiltonian(int n_max, double xi, double omega1_amp, double omega2_amp,
                                     int n_photon_levels, int n_phonon_levels) {
  check_effective_args(n_max, xi);
  ModelParams shape;
  shape.n_photon_levels = n_photon_levels;
  shape.n_phonon_levels = n_phonon_levels;
  shape.validate();
  if (n_phonon_levels < n_max + 1) throw std::invalid_argument("embed_effective_hamiltonian: phonon truncation < N + 1");

  const specfun::FranckCondonTable w(xi, n_phonon_levels);
  Operator h(shape.dim());
  for (int p = 0; p < n_max; ++p) {
    const double c1 = specfun::coupling_coefficient(1, p, p, xi) * omega1_amp;
    const double c2 = specfun::coupling_coefficient(1, p + 1, p, xi) * omega2_amp;
    // |psi_{1,p}> = sum_q W[q][p] |1, q>
    for (int q = 0; q < n_phonon_levels; ++q) {
      const std::size_t row = shape.index(1, q);
      h(row, shape.index(0, p)) += c1 * w(q, p);
      h(row, shape.index(0, p + 1)) += c2 * w(q, p);
    }
  }
  // Only the photon-1 rows / photon-0 columns block is filled so far.
  for (std::size_t i = 0; i < h.dim(); ++i)
    for (std::size_t j = 0; j < i; ++j) h(j, i) = std::conj(h(i, j));
  return h;
}

Ket embed_effective_state(std::span<const double> amplitudes, int n_photon_levels, int n_phonon_levels) {
  ModelParams shape;
  shape.n_photon_levels = n_photon_levels;
  shape.n_phonon_levels = n_phonon_levels;
  shape.validate();
  if (amplitudes.size() > static_cast<std::size_t>(n_phonon_levels)) {
    throw std::invalid_argument("embed_effective_state: phonon truncation < N + 1");
  }
  Ket k(shape.dim());
  for (std::size_t p = 0; p < amplitudes.size(); ++p) k[shape.index(0, static_cast<int>(p))] = amplitudes[p];
  return k;
}

}  // namespace optodark
