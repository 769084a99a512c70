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

// CSV and JSON emission. Floats are written with 12 significant digits;
// files are written to a temporary sibling and renamed into place.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "optodark/config.hpp"
#include "optodark/dynamics.hpp"

namespace optodark {

// Schema tag of the time-series CSV, recorded in the metadata sidecar.
inline constexpr const char* kTimeSeriesSchema = "optodark.timeseries.v1";
inline constexpr const char* kTimeSeriesHeader = "t,F,photon,phonon,trace_error,tail,min_eigenvalue";

// %.12g; NaN becomes an empty field.
std::string format_double(double x);

std::string timeseries_csv(const TimeSeries& ts);

void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct RunOutcome {
  std::optional<TimeSeries> series;
  std::optional<ConvergenceReport> convergence;
  // Set when the run stopped on a NumericalAbort.
  std::optional<std::string> abort_message;
  double wall_seconds = 0.0;
};

// Sidecar: schema tags, the fully resolved configuration under "config",
// the keys that were defaulted, wall time and the convergence result.
nlohmann::json run_metadata(const RunConfig& cfg, const RunOutcome& outcome);

}  // namespace optodark
