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

#include "optodark/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "optodark/output.hpp"

namespace optodark {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& text, const std::string& axis) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != e) {
    throw std::invalid_argument("grid axis '" + axis + "': '" + text + "' is not a number");
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const GridAxis& a : axes) n *= a.values.size();
  return n;
}

std::vector<double> SweepGrid::coordinates(std::size_t point) const {
  if (point >= size()) throw std::out_of_range("grid point out of range");
  std::vector<double> out(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t n = axes[k].values.size();
    out[k] = axes[k].values[point % n];
    point /= n;
  }
  return out;
}

SweepGrid parse_grid(std::string_view spec, RatioConvention convention) {
  static const std::vector<std::string> known = {"ratio", "gamma_m", "gamma_c", "g_deviation"};
  SweepGrid grid;
  grid.ratio_convention = convention;
  for (std::string_view term : split(spec, ';')) {
    const std::string t = trim(term);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid term '" + t + "' lacks '='");
    GridAxis axis{trim(std::string_view(t).substr(0, eq)), {}};
    if (std::find(known.begin(), known.end(), axis.name) == known.end()) {
      throw std::invalid_argument("unknown grid axis '" + axis.name + "'");
    }
    for (const GridAxis& a : grid.axes) {
      if (a.name == axis.name) throw std::invalid_argument("grid axis '" + axis.name + "' given twice");
    }
    for (std::string_view v : split(std::string_view(t).substr(eq + 1), ',')) {
      axis.values.push_back(parse_number(trim(v), axis.name));
    }
    grid.axes.push_back(std::move(axis));
  }
  if (grid.axes.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

RunConfig apply_grid_point(const RunConfig& base, const SweepGrid& grid, std::size_t point) {
  RunConfig cfg = base;
  ModelParams& m = cfg.evolution.params;
  const std::vector<double> c = grid.coordinates(point);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const std::string& name = grid.axes[k].name;
    if (name == "gamma_m") {
      m.gamma_m = c[k];
    } else if (name == "gamma_c") {
      m.gamma_c = c[k];
    } else if (name == "g_deviation") {
      cfg.g_deviation = c[k];
    } else if (name == "ratio") {
      const double r12 = to_omega1_over_omega2(c[k], grid.ratio_convention);
      if (!(r12 >= 0.0)) throw std::invalid_argument("ratio must be nonnegative");
      const double peak = std::max(m.omega1_amp, m.omega2_amp);
      if (r12 <= 1.0) {
        m.omega2_amp = peak;
        m.omega1_amp = r12 * peak;
      } else {
        m.omega1_amp = peak;
        m.omega2_amp = peak / r12;
      }
    }
  }
  m.validate();
  cfg.refresh_target();
  cfg.evolution.validate();
  return cfg;
}

std::size_t SweepResult::failed() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(),
                                                [](const SweepPoint& p) { return p.status != "ok"; }));
}

SweepResult run_sweep(const RunConfig& base, const SweepGrid& grid, int jobs, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::size_t n = grid.size();
  SweepResult result;
  result.points.resize(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepPoint& pt = result.points[i];
      pt.index = i;
      pt.coordinates = grid.coordinates(i);
      char name[32];
      std::snprintf(name, sizeof name, "point_%04zu.csv", i);
      try {
        const RunConfig cfg = apply_grid_point(base, grid, i);
        const TimeSeries ts = evolve(cfg.effective_evolution());
        write_file_atomic(out_dir / name, timeseries_csv(ts));
        pt.path = name;
        pt.status = "ok";
        pt.final_fidelity = ts.final().fidelity;
      } catch (const NumericalAbort& e) {
        pt.status = "abort";
        pt.message = e.what();
      } catch (const std::exception& e) {
        pt.status = "error";
        pt.message = e.what();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs > 0 ? static_cast<std::size_t>(jobs) : 1, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::string index = "point";
  for (const GridAxis& a : grid.axes) index += "," + a.name;
  index += ",path,status,final_F,message\n";
  for (const SweepPoint& pt : result.points) {
    index += std::to_string(pt.index);
    for (double c : pt.coordinates) index += "," + format_double(c);
    index += "," + pt.path + "," + pt.status + ",";
    if (pt.status == "ok") index += format_double(pt.final_fidelity);
    index += "," + csv_field(pt.message) + "\n";
  }
  write_file_atomic(out_dir / "index.csv", index);
  return result;
}

}  // namespace optodark
