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

// Run configuration: `[section]` headers followed by `key = value` lines,
// `#` or `;` comments. Unknown sections or keys are errors. Frequencies carry
// the suffix _wm (units of omega_M), times _per_wm (units of 1/omega_M).
//
//   [model]
//   g_wm = 0.37
//   omega1_wm = 0.0033333333
//   omega2_wm = 0.01
//   delta1_wm = -0.14        # optional, defaults to -g^2
//   gamma_c_wm = 0.05
//   [darkstate]
//   n_max = 10
//   [evolution]
//   t_final_per_wm = 8000
//
// A metadata sidecar written by `evolve` (JSON, with the resolved
// configuration under "config") is accepted in place of the text form.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "optodark/dynamics.hpp"

namespace optodark {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  int n_max = 0;
  // Target xi; defaults to g.
  std::optional<double> xi;
  EvolutionConfig evolution;

  double g_deviation = 0.0;
  DeviationTarget deviation_target = DeviationTarget::recomputed;
  bool convergence_check = false;
  double convergence_tolerance = 5e-3;

  double max_drive_over_margin = 0.2;
  double resonance_tolerance = 5e-3;

  std::string csv_path = "run.csv";
  std::string metadata_path = "run.json";

  // Keys that were filled in rather than read, "section.key".
  std::vector<std::string> defaulted;

  // Omega_1 / Omega_2 of the configured drives.
  double drive_ratio() const;
  // Rebuilds evolution.target from n_max, xi (or g) and the drive ratio.
  void refresh_target();
  // The configuration actually integrated (g deviation applied).
  EvolutionConfig effective_evolution() const;
};

RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

// Fully resolved configuration, every key explicit; parse_run_config
// accepts {"config": to_json(cfg)} and reproduces cfg.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace optodark
