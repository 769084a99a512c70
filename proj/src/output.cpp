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

#include "optodark/output.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace optodark {

std::string format_double(double x) {
  if (std::isnan(x)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string timeseries_csv(const TimeSeries& ts) {
  std::string out = kTimeSeriesHeader;
  out += '\n';
  for (const Sample& s : ts.samples) {
    for (double v : {s.t, s.fidelity, s.photon, s.phonon, s.trace_error, s.tail}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(s.min_eigenvalue);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

nlohmann::json run_metadata(const RunConfig& cfg, const RunOutcome& outcome) {
  nlohmann::json j;
  j["schema"] = "optodark.run.v1";
  j["csv_schema"] = kTimeSeriesSchema;
  j["csv_columns"] = kTimeSeriesHeader;
  j["config"] = to_json(cfg);
  j["defaulted"] = cfg.defaulted;
  j["wall_seconds"] = outcome.wall_seconds;
  const DarkState& d = cfg.evolution.target;
  j["target"] = {{"n_max", d.n_max}, {"xi", d.xi}, {"ratio_omega1_over_omega2", d.ratio}, {"norm_c", d.norm_c}};
  if (outcome.series && !outcome.series->samples.empty()) {
    const TimeSeries& ts = *outcome.series;
    const Sample& f = ts.final();
    j["result"] = {{"t_final", f.t},
                   {"final_fidelity", f.fidelity},
                   {"final_photon", f.photon},
                   {"final_phonon", f.phonon},
                   {"max_trace_error", ts.max_trace_error()},
                   {"max_hermiticity_error", ts.max_hermiticity_error()}};
    const double me = ts.min_eigenvalue();
    j["result"]["min_eigenvalue"] = std::isnan(me) ? nlohmann::json() : nlohmann::json(me);
  } else {
    j["result"] = nullptr;
  }
  j["abort"] = outcome.abort_message ? nlohmann::json(*outcome.abort_message) : nlohmann::json();
  if (outcome.convergence) {
    const ConvergenceReport& c = *outcome.convergence;
    j["convergence"] = {{"passed", c.passed},
                        {"max_df", c.max_df},
                        {"max_df_dt", c.max_df_dt},
                        {"max_df_truncation", c.max_df_truncation},
                        {"tolerance", c.tolerance},
                        {"refined_phonon_levels", c.refined_phonon_levels}};
    if (!c.failure.empty()) j["convergence"]["failure"] = c.failure;
  } else {
    j["convergence"] = nullptr;
  }
  return j;
}

}  // namespace optodark
