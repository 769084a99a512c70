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

#include "optodark/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optodark/kernels.hpp"

namespace optodark {

namespace {

constexpr double kEntryAbort = 1e-8;

std::vector<CollapseChannel> standard_collapse(const ModelParams& params) {
  std::vector<CollapseChannel> out;
  const auto nc = static_cast<std::size_t>(params.n_photon_levels);
  const auto nm = static_cast<std::size_t>(params.n_phonon_levels);
  if (params.gamma_c > 0.0) out.push_back({kron(fock_annihilation(nc), Operator::identity(nm)), params.gamma_c});
  if (params.gamma_m > 0.0) out.push_back({kron(Operator::identity(nc), fock_annihilation(nm)), params.gamma_m});
  return out;
}

Operator effective_hamiltonian(const Operator& h_static, const std::vector<CollapseChannel>& collapse) {
  Operator h = h_static;
  for (const auto& c : collapse) {
    if (c.op.dim() != h.dim()) throw std::invalid_argument("collapse operator dimension mismatch");
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw std::invalid_argument("collapse rate must be finite and >= 0");
    if (c.rate == 0.0) continue;
    h -= cplx(0.0, 0.5 * c.rate) * (c.op.adjoint() * c.op);
  }
  return h;
}

}  // namespace

LindbladGenerator::LindbladGenerator(const Operator& h_static, const std::vector<CollapseChannel>& collapse)
    : dim_(h_static.dim()), h_(effective_hamiltonian(h_static, collapse)) {
  for (const auto& c : collapse) {
    if (c.rate > 0.0) channels_.push_back({SparseOperator(c.op), c.rate});
  }
}

LindbladGenerator::LindbladGenerator(const Operator& h_static, const std::vector<CollapseChannel>& collapse,
                                     const Operator& raise, DriveAmplitude amplitude)
    : LindbladGenerator(h_static, collapse) {
  if (raise.dim() != dim_) throw std::invalid_argument("drive operator dimension mismatch");
  const Operator lower = raise.adjoint();
  Operator pattern(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      if (raise(i, j) != cplx{} || lower(i, j) != cplx{}) pattern(i, j) = 1.0;
  h_ = SparseOperator(effective_hamiltonian(h_static, collapse), pattern);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      if (raise(i, j) != cplx{}) raise_slots_.push_back({static_cast<std::size_t>(h_.find(i, j)), raise(i, j)});
      if (lower(i, j) != cplx{}) lower_slots_.push_back({static_cast<std::size_t>(h_.find(i, j)), lower(i, j)});
    }
  amplitude_ = std::move(amplitude);
}

LindbladGenerator::Workspace LindbladGenerator::make_workspace() const {
  return {std::vector<cplx>(h_.values().begin(), h_.values().end()), Operator(dim_), Operator(dim_), Operator(dim_)};
}

void LindbladGenerator::apply(double t, const Operator& rho, Operator& out, Workspace& ws) const {
  const cplx minus_i(0.0, -1.0);
  if (amplitude_) {
    const auto base = h_.values();
    std::copy(base.begin(), base.end(), ws.values.begin());
    const cplx f = amplitude_(t);
    const cplx fc = std::conj(f);
    for (const auto& s : raise_slots_) ws.values[s.slot] += f * s.coeff;
    for (const auto& s : lower_slots_) ws.values[s.slot] += fc * s.coeff;
    h_.apply(ws.values, rho, minus_i, ws.y, false);
  } else {
    h_.apply(rho, minus_i, ws.y, false);
  }
  add_adjoint(ws.y, out);

  const auto& k = kernels::active();
  for (const auto& c : channels_) {
    c.op.apply(rho, 1.0, ws.t, false);         // C rho
    k.adjoint(dim_, ws.t.data(), ws.t_adj.data());  // rho C^dag
    c.op.apply(ws.t_adj, c.rate, out, true);   // C rho C^dag
  }
}

Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, const std::vector<CollapseChannel>& collapse) {
  if (rho.dim() != h.dim()) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  const LindbladGenerator gen(h, collapse);
  auto ws = gen.make_workspace();
  Operator out(h.dim());
  gen.apply(0.0, rho.op(), out, ws);
  return out;
}

void EvolutionConfig::validate() const {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(t_final >= dt) || !std::isfinite(t_final)) throw std::invalid_argument("t_final must be >= dt");
  if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  if (target.beta.empty()) throw std::invalid_argument("evolution target dark state is not set");
  if (target.n_max + 1 > params.n_phonon_levels) {
    throw std::invalid_argument("phonon truncation must exceed the dark-state cutoff N");
  }
  if (initial_state && initial_state->dim() != params.dim()) throw std::invalid_argument("initial state dimension mismatch");
}

double fidelity(const DensityMatrix& rho, const Ket& target) {
  if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const cplx f = inner(target, rho.op() * target);
  if (std::abs(f.imag()) > 1e-10) throw std::domain_error("fidelity: <D|rho|D> has an imaginary part");
  return f.real();
}

double TimeSeries::max_trace_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.trace_error);
  return m;
}

double TimeSeries::max_hermiticity_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.hermiticity_error);
  return m;
}

double TimeSeries::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (!std::isnan(s.min_eigenvalue)) m = std::min(m, s.min_eigenvalue);
  return m;
}

TimeSeries evolve(const EvolutionConfig& cfg) {
  cfg.validate();
  const ModelParams& params = cfg.params;
  const std::size_t d = params.dim();
  const int nc = params.n_photon_levels;
  const int nm = params.n_phonon_levels;
  const auto collapse = standard_collapse(params);

  // Integrating factor: the diagonal of the static Hamiltonian (the free
  // phonon energies for H_r) is propagated exactly as elementwise phases and
  // RK4 only sees the remainder. Plain RK4 damps a coherence between levels
  // split by w by about (w dt)^6 / 144 per step; that kernel is not positive
  // definite, and over 1e5+ steps it drives near-pure states below zero.
  const FullHamiltonian full(params);
  Operator h_static = cfg.use_effective ? embed_effective_hamiltonian(cfg.target.n_max, params.g, params.omega1_amp,
                                                                      params.omega2_amp, nc, nm)
                                        : full.static_part();
  std::vector<double> omega(d);
  for (std::size_t i = 0; i < d; ++i) {
    omega[i] = h_static(i, i).real();
    h_static(i, i) = 0.0;
  }
  std::optional<LindbladGenerator> gen;
  if (cfg.use_effective) {
    gen.emplace(h_static, collapse);
  } else {
    gen.emplace(h_static, collapse, full.raise(), [params](double t) { return drive_amplitude(params, t); });
  }
  auto ws = gen->make_workspace();
  const auto& k = kernels::active();

  // Free evolution over dt/2 and dt: X_ab -> X_ab exp(-i (w_a - w_b) tau).
  Operator half_phase(d);
  Operator full_phase(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const double w = omega[a] - omega[b];
      half_phase(a, b) = std::polar(1.0, -0.5 * w * cfg.dt);
      full_phase(a, b) = std::polar(1.0, -w * cfg.dt);
    }
  }

  const Ket target = cfg.target.embed(nc, nm);
  const bool rotate = cfg.co_rotating_target && !cfg.use_effective;

  const Ket initial = cfg.initial_state ? *cfg.initial_state : Ket::basis(d, params.index(0, 0));
  DensityMatrix rho = DensityMatrix::pure(initial);

  std::vector<double> photon_number(d);
  std::vector<double> phonon_number(d);
  for (int n = 0; n < nc; ++n)
    for (int p = 0; p < nm; ++p) {
      photon_number[params.index(n, p)] = n;
      phonon_number[params.index(n, p)] = p;
    }

  const long n_steps = std::lround(cfg.t_final / cfg.dt);
  const double dt = cfg.dt;
  TimeSeries series;
  series.samples.reserve(static_cast<std::size_t>(n_steps / cfg.sample_every + 2));

  auto record = [&](long step) {
    const double t = static_cast<double>(step) * dt;
    Sample s;
    s.t = t;
    s.trace_error = std::abs(rho.trace() - 1.0);
    s.hermiticity_error = rho.hermiticity_error();
    // Trace and Hermiticity are conserved by construction, so a blow-up
    // shows up as entries outside the unit disc.
    const double peak = rho.op().max_abs();
    if (!(peak <= 1.0 + kEntryAbort) || !(s.hermiticity_error <= kEntryAbort)) {
      throw NumericalAbort(NumericalAbort::Kind::instability, step, t, peak,
                           "density matrix entry of modulus " + std::to_string(peak) + " at t = " +
                               std::to_string(t) + "; reduce dt");
    }
    if (rotate) {
      Ket moving = target;
      for (int p = 0; p < nm; ++p) moving[params.index(0, p)] *= std::polar(1.0, -static_cast<double>(p) * t);
      s.fidelity = fidelity(rho, moving);
    } else {
      s.fidelity = fidelity(rho, target);
    }
    const Operator& m = rho.op();
    double tail = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double pop = m(i, i).real();
      s.photon += photon_number[i] * pop;
      s.phonon += phonon_number[i] * pop;
      if (phonon_number[i] >= nm - 2) tail += pop;
    }
    s.tail = tail;
    s.min_eigenvalue = cfg.check_positivity ? rho.min_eigenvalue() : std::numeric_limits<double>::quiet_NaN();
    series.samples.push_back(s);
    if (tail > cfg.leak_threshold) {
      throw NumericalAbort(NumericalAbort::Kind::truncation_leak, step, t, tail,
                           "population in the top two phonon levels reached " + std::to_string(tail) + " at t = " +
                               std::to_string(t) + "; increase n_phonon_levels");
    }
  };

  record(0);
  Operator k1(d), k2(d), k3(d);
  Operator stage(d), acc(d), free(d);
  const std::size_t n2 = d * d;
  const cplx* ph = half_phase.data();
  const cplx* pf = full_phase.data();
  for (long step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    const Operator& r = rho.op();

    // Lawson RK4 written in the original frame; E_tau is the free evolution.
    gen->apply(t, r, k1, ws);
    k.hwaxpy(n2, ph, 0.5 * dt, k1.data(), r.data(), stage.data());  // E_{h/2}(r + h/2 k1)
    k.hwaxpy(n2, pf, dt / 6.0, k1.data(), r.data(), acc.data());    // E_h(r + h/6 k1)
    k.hwaxpy(n2, ph, 0.0, k1.data(), r.data(), free.data());        // E_{h/2} r

    gen->apply(t + 0.5 * dt, stage, k2, ws);
    k.waxpy(n2, 0.5 * dt, k2.data(), free.data(), stage.data());  // E_{h/2} r + h/2 k2

    gen->apply(t + 0.5 * dt, stage, k3, ws);
    k.hwaxpy(n2, ph, dt, k3.data(), free.data(), stage.data());  // E_h r + h E_{h/2} k3
    k.hwaxpy(n2, ph, 1.0, k3.data(), k2.data(), free.data());    // E_{h/2}(k2 + k3)
    k.axpy(n2, dt / 3.0, free.data(), acc.data());

    gen->apply(t + dt, stage, k1, ws);
    k.axpy(n2, dt / 6.0, k1.data(), acc.data());
    std::swap(rho.op(), acc);

    const double terr = std::abs(rho.trace() - 1.0);
    if (!(terr <= cfg.trace_abort)) {
      throw NumericalAbort(NumericalAbort::Kind::instability, step + 1, (step + 1) * dt, terr,
                           "trace error " + std::to_string(terr) + " at step " + std::to_string(step + 1) +
                               "; reduce dt");
    }
    if ((step + 1) % cfg.sample_every == 0 || step + 1 == n_steps) record(step + 1);
  }
  return series;
}

TimeSeries mechanical_damping_variant(EvolutionConfig cfg, double gamma_m) {
  if (!(gamma_m >= 0.0)) throw std::invalid_argument("gamma_m must be >= 0");
  cfg.params.gamma_m = gamma_m;
  return evolve(cfg);
}

EvolutionConfig deviated_config(const EvolutionConfig& cfg, double relative_deviation, DeviationTarget target) {
  if (!(std::abs(relative_deviation) < 0.2)) throw std::invalid_argument("relative g deviation must satisfy |d| < 0.2");
  const int n = cfg.target.n_max;
  const double gn = find_gn(n);
  const double g = gn * (1.0 + relative_deviation);

  EvolutionConfig out = cfg;
  out.params.g = g;
  const Detunings det = resonance_detunings(g);
  out.params.delta1 = det.delta1;
  out.params.delta2 = det.delta2;
  if (target == DeviationTarget::recomputed) {
    out.target = dark_state(cfg.params.n_phonon_levels - 1, g, cfg.target.ratio);
    // beta_p no longer terminates at N; for Omega_1 < Omega_2 it decays and
    // the truncated tail must be negligible. For Omega_1 > Omega_2 it grows
    // and the target is only meaningful as a comparison.
    if (cfg.target.ratio < 1.0) {
      const auto pop = out.target.populations();
      const double tail = pop[pop.size() - 1] + pop[pop.size() - 2];
      if (!(tail < 1e-8)) {
        throw NumericalAbort(NumericalAbort::Kind::truncation_leak, 0, 0.0, tail,
                             "extended dark-state target has weight " + std::to_string(tail) +
                                 " in the top two phonon levels; increase n_phonon_levels");
      }
    }
  } else {
    out.target = dark_state(n, gn, cfg.target.ratio);
  }
  return out;
}

TimeSeries g_deviation_study(const EvolutionConfig& cfg, double relative_deviation, DeviationTarget target) {
  if (relative_deviation == 0.0) return evolve(cfg);
  return evolve(deviated_config(cfg, relative_deviation, target));
}

ConvergenceReport convergence_check(const EvolutionConfig& cfg, const TimeSeries* baseline, double tolerance) {
  ConvergenceReport report;
  report.tolerance = tolerance;

  EvolutionConfig fine = cfg;
  fine.dt = cfg.dt / 2.0;
  fine.sample_every = cfg.sample_every * 2;

  EvolutionConfig wide = cfg;
  wide.params.n_phonon_levels = static_cast<int>(std::ceil(1.5 * cfg.params.n_phonon_levels));
  report.refined_phonon_levels = wide.params.n_phonon_levels;
  if (wide.target.n_max + 1 == cfg.params.n_phonon_levels) {
    // target spans the whole truncation (deviation study); extend it too
    wide.target = dark_state(wide.params.n_phonon_levels - 1, cfg.target.xi, cfg.target.ratio);
  }

  auto max_diff = [](const TimeSeries& a, const TimeSeries& b) {
    if (a.samples.size() != b.samples.size()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      m = std::max(m, std::abs(a.samples[i].fidelity - b.samples[i].fidelity));
    return m;
  };

  try {
    TimeSeries base_local;
    if (baseline == nullptr) {
      base_local = evolve(cfg);
      baseline = &base_local;
    }
    report.max_df_dt = max_diff(*baseline, evolve(fine));
    report.max_df_truncation = max_diff(*baseline, evolve(wide));
  } catch (const std::exception& e) {
    report.failure = e.what();
    report.max_df = std::numeric_limits<double>::infinity();
    report.passed = false;
    return report;
  }
  report.max_df = std::max(report.max_df_dt, report.max_df_truncation);
  report.passed = report.max_df < tolerance;
  return report;
}

}  // namespace optodark
