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

// Cartesian parameter sweeps over independent evolve runs.
//
// Grid syntax: `axis=v1,v2,...` terms separated by ';', e.g.
//   ratio=2,3;gamma_m=0,1e-5,1e-4;g_deviation=0,0.03
// Axes: ratio, gamma_m, gamma_c, g_deviation. The ratio axis is read in the
// chosen convention and keeps max(Omega_1, Omega_2) of the base config fixed.
// Points are numbered row-major (last axis fastest); outputs are named by
// point number, so they do not depend on the worker count.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "optodark/config.hpp"
#include "optodark/darkstate.hpp"

namespace optodark {

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepGrid {
  std::vector<GridAxis> axes;
  RatioConvention ratio_convention = RatioConvention::omega2_over_omega1;

  std::size_t size() const;
  std::vector<double> coordinates(std::size_t point) const;
};

// Throws std::invalid_argument on malformed specs, unknown or repeated axes.
SweepGrid parse_grid(std::string_view spec, RatioConvention convention = RatioConvention::omega2_over_omega1);

// The base configuration with the point's coordinates applied and the target rebuilt.
RunConfig apply_grid_point(const RunConfig& base, const SweepGrid& grid, std::size_t point);

struct SweepPoint {
  std::size_t index = 0;
  std::vector<double> coordinates;
  std::string path;     // relative to the output directory; empty on failure
  std::string status;   // ok, abort, error
  double final_fidelity = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t failed() const;
};

// Writes point_NNNN.csv per point and index.csv into out_dir. Failures of
// individual points are recorded in the index and do not stop the sweep.
SweepResult run_sweep(const RunConfig& base, const SweepGrid& grid, int jobs, const std::filesystem::path& out_dir);

}  // namespace optodark
