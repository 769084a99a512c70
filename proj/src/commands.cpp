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

#include "optodark/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <tuple>
#include <limits>

#include <CLI11.hpp>

#include "optodark/config.hpp"
#include "optodark/darkstate.hpp"
#include "optodark/kernels.hpp"
#include "optodark/model.hpp"
#include "optodark/output.hpp"
#include "optodark/sweep.hpp"

namespace optodark {

namespace {

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

RatioConvention convention_or_throw(const std::string& text) {
  const auto c = parse_ratio_convention(text);
  if (!c) throw CLI::ValidationError("--ratio-convention", "expected 1/2 or 2/1, got '" + text + "'");
  return *c;
}

int cmd_gn(int n, int max_n, std::ostream& out, std::ostream& err) {
  const int lo = max_n > 0 ? 1 : n;
  const int hi = max_n > 0 ? max_n : n;
  if (lo < 1 || hi > kMaxMagicIndex) {
    err << "error: N must lie in [1, " << kMaxMagicIndex << "]\n";
    return kExitConfig;
  }
  out << "N,g_N\n";
  for (int k = lo; k <= hi; ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.12f\n", k, find_gn(k));
    out << buf;
  }
  return kExitOk;
}

int cmd_darkstate(int n, double ratio, const std::string& convention, std::optional<double> xi, std::ostream& out) {
  const double r12 = to_omega1_over_omega2(ratio, convention_or_throw(convention));
  const DarkState ds = dark_state(n, xi.value_or(find_gn(n)), r12);
  const std::vector<double> pop = ds.populations();
  std::size_t rows = ds.beta.size();
  while (rows > 1 && ds.beta[rows - 1] == 0.0) --rows;
  out << "p,beta,P\n";
  for (std::size_t p = 0; p < rows; ++p) {
    out << p << ',' << format_double(ds.beta[p]) << ',' << format_double(pop[p]) << '\n';
  }
  const PhononStatistics st = phonon_statistics(ds);
  out << "# mean=" << format_double(st.mean) << ",variance=" << format_double(st.variance)
      << ",fano=" << (st.fano ? format_double(*st.fano) : std::string()) << ",C2=" << format_double(ds.norm_c * ds.norm_c)
      << '\n';
  return kExitOk;
}

int cmd_fano_sweep(int n, double a, double b, int steps, bool log_grid, std::ostream& out, std::ostream& err) {
  if (!(a < b)) {
    err << "error: --ratio-min must be smaller than --ratio-max\n";
    return kExitConfig;
  }
  if (a < 0.0 || steps < 2 || (log_grid && a <= 0.0)) {
    err << "error: need ratio-min >= 0 (> 0 with --log) and steps >= 2\n";
    return kExitConfig;
  }
  const double g = find_gn(n);
  out << "ratio,mean,fano\n";
  for (int i = 0; i < steps; ++i) {
    const double s = static_cast<double>(i) / (steps - 1);
    double r = log_grid ? a * std::pow(b / a, s) : a + (b - a) * s;
    if (i == steps - 1) r = b;
    const PhononStatistics st = phonon_statistics(dark_state(n, g, r));
    out << format_double(r) << ',' << format_double(st.mean) << ',' << (st.fano ? format_double(*st.fano) : std::string())
        << '\n';
  }
  return kExitOk;
}

struct EvolveOptions {
  std::string config;
  std::optional<double> gamma_m;
  std::optional<double> g_deviation;
  std::optional<std::string> csv;
  std::optional<std::string> metadata;
  bool convergence = false;
};

int cmd_evolve(const EvolveOptions& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_run_config(o.config);
  if (o.gamma_m) {
    if (!(*o.gamma_m >= 0.0)) throw ConfigError("--gamma-m", 0, "must be >= 0");
    cfg.evolution.params.gamma_m = *o.gamma_m;
  }
  if (o.g_deviation) {
    if (!(std::abs(*o.g_deviation) < 0.2)) throw ConfigError("--g-deviation", 0, "must satisfy |d| < 0.2");
    cfg.g_deviation = *o.g_deviation;
  }
  if (o.csv) cfg.csv_path = *o.csv;
  if (o.metadata) cfg.metadata_path = *o.metadata;
  if (o.convergence) cfg.convergence_check = true;

  const EvolutionConfig run = cfg.effective_evolution();
  RunOutcome outcome;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    outcome.series = evolve(run);
  } catch (const NumericalAbort& e) {
    outcome.abort_message = e.what();
    outcome.wall_seconds = elapsed();
    write_file_atomic(cfg.metadata_path, run_metadata(cfg, outcome).dump(2) + "\n");
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  }
  if (cfg.convergence_check) outcome.convergence = convergence_check(run, &*outcome.series, cfg.convergence_tolerance);
  outcome.wall_seconds = elapsed();

  write_file_atomic(cfg.csv_path, timeseries_csv(*outcome.series));
  write_file_atomic(cfg.metadata_path, run_metadata(cfg, outcome).dump(2) + "\n");

  const Sample& f = outcome.series->final();
  out << "t=" << format_double(f.t) << " F=" << fmt("%.6f", f.fidelity) << " photon=" << format_double(f.photon)
      << " phonon=" << format_double(f.phonon) << " kernels=" << kernels::active().name << '\n';
  out << "wrote " << cfg.csv_path << ", " << cfg.metadata_path << '\n';
  if (outcome.convergence) {
    const ConvergenceReport& c = *outcome.convergence;
    out << "convergence max_dF=" << format_double(c.max_df) << " tolerance=" << format_double(c.tolerance)
        << (c.passed ? " ok" : " FAILED") << '\n';
    if (!c.passed) {
      err << "convergence check failed" << (c.failure.empty() ? "" : ": " + c.failure) << '\n';
      return kExitNumerical;
    }
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, std::optional<double> max_ratio, std::ostream& out) {
  RunConfig cfg = load_run_config(path);
  if (max_ratio) cfg.max_drive_over_margin = *max_ratio;
  const ModelParams& m = cfg.evolution.params;
  bool ok = true;

  const Detunings want = resonance_detunings(m.g);
  const double tol = cfg.resonance_tolerance;
  for (const auto& [name, have, expect] : {std::tuple{"delta1", m.delta1, want.delta1}, std::tuple{"delta2", m.delta2, want.delta2}}) {
    const bool good = std::abs(have - expect) <= tol;
    ok = ok && good;
    out << "resonance " << name << "=" << format_double(have) << " expected=" << fmt("%.6f", expect)
        << " diff=" << fmt("%.3g", std::abs(have - expect)) << " tol=" << format_double(tol)
        << (good ? " ok" : " MISMATCH") << '\n';
  }

  const BlockadeMargin bm = blockade_margin(m.g);
  const double drive = std::max(m.omega1_amp, m.omega2_amp);
  const double ratio = bm.margin > 0.0 ? drive / bm.margin : std::numeric_limits<double>::infinity();
  const bool blockade_ok = ratio <= cfg.max_drive_over_margin;
  ok = ok && blockade_ok;
  out << "blockade K=" << bm.k << " margin=" << fmt("%.4f", bm.margin) << " omega_max=" << format_double(drive)
      << " omega_max/margin=" << fmt("%.3g", ratio) << " limit=" << format_double(cfg.max_drive_over_margin)
      << (blockade_ok ? " ok" : " EXCEEDED") << '\n';

  const int headroom = m.n_phonon_levels - (cfg.n_max + 1);
  const bool trunc_ok = headroom >= 2;
  ok = ok && trunc_ok;
  out << "truncation n_phonon_levels=" << m.n_phonon_levels << " n_max=" << cfg.n_max << " headroom=" << headroom
      << (trunc_ok ? " ok" : " INSUFFICIENT") << '\n';

  out << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitInvalid;
}

int cmd_sweep(const std::string& path, const std::string& grid_spec, const std::string& convention, int jobs,
              const std::string& out_dir, std::ostream& out) {
  const RunConfig cfg = load_run_config(path);
  SweepGrid grid;
  try {
    grid = parse_grid(grid_spec, convention_or_throw(convention));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--grid", 0, e.what());
  }
  const SweepResult r = run_sweep(cfg, grid, jobs, out_dir);
  out << "points=" << r.points.size() << " failed=" << r.failed() << " index=" << (std::filesystem::path(out_dir) / "index.csv").string()
      << '\n';
  return r.failed() == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dark states of a two-tone driven optomechanical cavity", "optodark"};
  app.require_subcommand(1);

  int gn_n = 0;
  int gn_max = 0;
  auto* gn = app.add_subcommand("gn", "Smallest coupling g_N with a dark state of phonon cutoff N");
  auto* gn_n_opt = gn->add_option("--n", gn_n, "single N");
  auto* gn_max_opt = gn->add_option("--max-n", gn_max, "tabulate N = 1..M");
  gn_n_opt->excludes(gn_max_opt);

  int ds_n = 0;
  double ds_ratio = 0.0;
  std::string ds_conv;
  std::optional<double> ds_xi;
  auto* ds = app.add_subcommand("darkstate", "Dark-state amplitudes and phonon distribution");
  ds->add_option("--n", ds_n, "phonon cutoff N")->required();
  ds->add_option("--ratio", ds_ratio, "drive amplitude ratio")->required();
  ds->add_option("--ratio-convention", ds_conv, "1/2 for Omega1/Omega2, 2/1 for Omega2/Omega1")->required();
  ds->add_option("--xi", ds_xi, "displacement (default g_N)");

  int fs_n = 0;
  double fs_a = 0.0;
  double fs_b = 0.0;
  int fs_steps = 0;
  bool fs_log = false;
  auto* fs = app.add_subcommand("fano-sweep", "Fano factor of the dark state against Omega1/Omega2");
  fs->add_option("--n", fs_n, "phonon cutoff N")->required();
  fs->add_option("--ratio-min", fs_a, "smallest Omega1/Omega2")->required();
  fs->add_option("--ratio-max", fs_b, "largest Omega1/Omega2")->required();
  fs->add_option("--steps", fs_steps, "grid points")->required();
  fs->add_flag("--log", fs_log, "logarithmic grid");

  EvolveOptions ev_opts;
  auto* ev = app.add_subcommand("evolve", "Integrate the master equation and track the dark-state fidelity");
  ev->add_option("--config", ev_opts.config, "configuration file or metadata sidecar")->required();
  ev->add_option("--gamma-m", ev_opts.gamma_m, "mechanical damping rate override");
  ev->add_option("--g-deviation", ev_opts.g_deviation, "relative deviation of g from g_N");
  ev->add_option("--csv", ev_opts.csv, "time-series output path");
  ev->add_option("--metadata", ev_opts.metadata, "metadata sidecar path");
  ev->add_flag("--convergence-check", ev_opts.convergence, "rerun with dt/2 and a larger phonon space");

  std::string va_config;
  std::optional<double> va_max;
  auto* va = app.add_subcommand("validate", "Check resonance, blockade margin and truncation of a configuration");
  va->add_option("--config", va_config, "configuration file")->required();
  va->add_option("--max-drive-ratio", va_max, "largest allowed Omega_max / margin");

  std::string sw_config;
  std::string sw_grid;
  std::string sw_conv = "2/1";
  int sw_jobs = 1;
  std::string sw_out;
  auto* sw = app.add_subcommand("sweep", "Run evolve over a Cartesian parameter grid");
  sw->add_option("--config", sw_config, "base configuration")->required();
  sw->add_option("--grid", sw_grid, "e.g. ratio=2,3;gamma_m=0,1e-5")->required();
  sw->add_option("--ratio-convention", sw_conv, "convention of the ratio axis")->capture_default_str();
  sw->add_option("--jobs", sw_jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sw->add_option("--out-dir", sw_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gn->parsed()) {
      if (gn_n_opt->count() == 0 && gn_max_opt->count() == 0) {
        err << "error: gn needs --n or --max-n\n";
        return kExitConfig;
      }
      return cmd_gn(gn_n, gn_max, out, err);
    }
    if (ds->parsed()) return cmd_darkstate(ds_n, ds_ratio, ds_conv, ds_xi, out);
    if (fs->parsed()) return cmd_fano_sweep(fs_n, fs_a, fs_b, fs_steps, fs_log, out, err);
    if (ev->parsed()) return cmd_evolve(ev_opts, out, err);
    if (va->parsed()) return cmd_validate(va_config, va_max, out);
    if (sw->parsed()) return cmd_sweep(sw_config, sw_grid, sw_conv, sw_jobs, sw_out, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace optodark
