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

// Lindblad master-equation integration for the driven optomechanical cavity:
//
//   d rho/dt = -i [H(t), rho] - sum_k (gamma_k / 2)(C_k^dag C_k rho - 2 C_k rho C_k^dag + rho C_k^dag C_k)
//
// with C = a (cavity decay, gamma_c) and optionally C = b (zero-temperature
// mechanical damping, gamma_m). Fixed-step RK4 in integrating-factor (Lawson)
// form: the diagonal of the static Hamiltonian is applied exactly as phases,
// everything else, including H(t) at the exact stage times, goes through RK4.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optodark/darkstate.hpp"
#include "optodark/model.hpp"
#include "optodark/operator.hpp"

namespace optodark {

struct CollapseChannel {
  Operator op;
  double rate = 0.0;
};

// -i[H, rho] + dissipator, for a static H.
Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, const std::vector<CollapseChannel>& collapse);

// Precompiled right-hand side. H(t) = H_static + f(t) R + conj(f(t)) R^dag
// where R is optional. Uses the identity
//   rhs = Y + Y^dag + sum_k gamma_k C_k rho C_k^dag,  Y = -i (H - i K / 2) rho,
// K = sum_k gamma_k C_k^dag C_k, valid for Hermitian rho. H(t) - iK/2 is
// applied in a single sparse pass with the drive entries refreshed per call.
class LindbladGenerator {
 public:
  using DriveAmplitude = std::function<cplx(double)>;

  LindbladGenerator(const Operator& h_static, const std::vector<CollapseChannel>& collapse);
  LindbladGenerator(const Operator& h_static, const std::vector<CollapseChannel>& collapse,
                    const Operator& raise, DriveAmplitude amplitude);

  std::size_t dim() const { return dim_; }

  // Scratch space for apply(); one per thread.
  struct Workspace {
    std::vector<cplx> values;
    Operator y;
    Operator t;
    Operator t_adj;
  };
  Workspace make_workspace() const;

  // out = rhs(t, rho); out must not alias rho.
  void apply(double t, const Operator& rho, Operator& out, Workspace& ws) const;

 private:
  struct Channel {
    SparseOperator op;
    double rate;
  };
  struct DriveSlot {
    std::size_t slot;
    cplx coeff;
  };

  std::size_t dim_;
  // H - iK/2 with storage for the drive entries.
  SparseOperator h_;
  std::vector<DriveSlot> raise_slots_;
  std::vector<DriveSlot> lower_slots_;
  DriveAmplitude amplitude_;
  std::vector<Channel> channels_;
};

struct EvolutionConfig {
  ModelParams params;
  double t_final = 0.0;
  double dt = 0.02;
  int sample_every = 500;
  // Drive with the embedded rotating-wave Hamiltonian (static, interaction
  // picture) instead of H_r(t).
  bool use_effective = false;
  // Fidelity target; its n_max also sets the rotating-wave cutoff.
  DarkState target;
  // Compare against e^{-i H_0 t}|D> when integrating H_r(t), i.e. measure F
  // in the interaction picture where |D> is stationary. Ignored for
  // use_effective (already the interaction picture).
  bool co_rotating_target = true;
  // Population of the top two phonon levels that aborts the run.
  double leak_threshold = 1e-3;
  // |Tr rho - 1| that aborts the run (checked every step). An entry of
  // modulus above 1 + 1e-8 at a sample also aborts.
  double trace_abort = 1e-6;
  // Evaluate the smallest eigenvalue of rho at every sample.
  bool check_positivity = true;
  // Defaults to |0>_c |0>_M.
  std::optional<Ket> initial_state;

  void validate() const;
};

struct Sample {
  double t = 0.0;
  double fidelity = 0.0;
  double photon = 0.0;
  double phonon = 0.0;
  double trace_error = 0.0;
  double tail = 0.0;
  double min_eigenvalue = 0.0;  // NaN when not evaluated
  double hermiticity_error = 0.0;
};

struct TimeSeries {
  std::vector<Sample> samples;

  const Sample& final() const { return samples.back(); }
  double max_trace_error() const;
  double max_hermiticity_error() const;
  double min_eigenvalue() const;
};

class NumericalAbort : public std::runtime_error {
 public:
  enum class Kind { instability, truncation_leak };
  NumericalAbort(Kind kind, long step, double t, double value, const std::string& what)
      : std::runtime_error(what), kind_(kind), step_(step), t_(t), value_(value) {}
  Kind kind() const { return kind_; }
  long step() const { return step_; }
  double time() const { return t_; }
  double value() const { return value_; }

 private:
  Kind kind_;
  long step_;
  double t_;
  double value_;
};

// F = <D|rho|D>. Throws std::domain_error if the imaginary part exceeds 1e-10.
double fidelity(const DensityMatrix& rho, const Ket& target);

TimeSeries evolve(const EvolutionConfig& cfg);

TimeSeries mechanical_damping_variant(EvolutionConfig cfg, double gamma_m);

enum class DeviationTarget { recomputed, nominal };

// Config with g' = g_N (1 + relative_deviation), detunings re-derived from g'
// and the target rebuilt from g'. With DeviationTarget::recomputed the beta
// recursion runs to the phonon truncation, since A^{(1)}_{N,N} != 0 off g_N;
// for Omega_1 < Omega_2 a tail weight >= 1e-8 in the top two levels throws
// NumericalAbort.
EvolutionConfig deviated_config(const EvolutionConfig& cfg, double relative_deviation,
                                DeviationTarget target = DeviationTarget::recomputed);

TimeSeries g_deviation_study(const EvolutionConfig& cfg, double relative_deviation,
                             DeviationTarget target = DeviationTarget::recomputed);

struct ConvergenceReport {
  double max_df_dt = 0.0;
  double max_df_truncation = 0.0;
  double max_df = 0.0;
  double tolerance = 5e-3;
  bool passed = false;
  int refined_phonon_levels = 0;
  std::string failure;  // non-empty when a rerun aborted
};

// Reruns cfg with dt/2 and with 50% more phonon levels and compares F at the
// shared sample times. `baseline` may be supplied to avoid recomputing it.
ConvergenceReport convergence_check(const EvolutionConfig& cfg, const TimeSeries* baseline = nullptr,
                                    double tolerance = 5e-3);

}  // namespace optodark
