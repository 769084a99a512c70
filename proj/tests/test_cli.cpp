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


#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "optodark/commands.hpp"
#include "optodark/config.hpp"
#include "optodark/darkstate.hpp"
#include "optodark/output.hpp"
#include "optodark/sweep.hpp"

using namespace optodark;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"optodark"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> v;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      v.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  v.push_back(cur);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("optodark_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kFlagship =
    "[model]\n"
    "g_wm = 0.37\n"
    "omega1_wm = 0.005\n"
    "omega2_wm = 0.01\n"
    "delta1_wm = -0.14\n"
    "delta2_wm = -1.14\n"
    "gamma_c_wm = 0.05\n"
    "n_phonon_levels = 25\n"
    "[darkstate]\n"
    "n_max = 10\n"
    "[evolution]\n"
    "t_final_per_wm = 8000\n";

std::string short_run(const fs::path& dir, const std::string& extra_model = "") {
  return "[model]\n"
         "omega1_wm = 0.0033333333333333335\n"
         "omega2_wm = 0.01\n"
         "gamma_c_wm = 0.05\n"
         "n_phonon_levels = 8\n" +
         extra_model +
         "[darkstate]\n"
         "n_max = 3\n"
         "[evolution]\n"
         "t_final_per_wm = 20\n"
         "sample_every = 100\n"
         "[output]\n"
         "csv = " + (dir / "run.csv").string() + "\n"
         "metadata = " + (dir / "run.json").string() + "\n";
}

}  // namespace

TEST_CASE("config parsing rejects malformed input with line numbers") {
  const auto expect_error = [](const std::string& text, int line, const std::string& fragment) {
    CAPTURE(text);
    try {
      parse_run_config(text, "cfg");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_error("[darkstate]\nn_max = 3\n[evolution]\nt_final_per_wm = 1\nbogus = 2\n", 5, "unknown key");
  expect_error("[darkstate]\nn_max = 3\n[nowhere]\n", 3, "unknown section");
  expect_error("[darkstate]\nn_max = 3\nn_max = 4\n", 3, "duplicate");
  expect_error("[darkstate]\nn_max = 3x\n", 2, "not an integer");
  expect_error("[darkstate]\nn_max = 3\n", 0, "missing required key");
  expect_error("[darkstate]\nn_max\n", 2, "");
  expect_error("n_max = 3\n", 1, "");
}

TEST_CASE("defaults are filled and recorded") {
  const RunConfig c = parse_run_config("; comment\n[model]\nomega1_wm = 0.001\nomega2_wm = 0.003\n[darkstate]\nn_max = 3  # inline\n[evolution]\nt_final_per_wm = 5\n");
  CHECK(c.n_max == 3);
  CHECK(c.evolution.params.g == find_gn(3));
  CHECK(c.evolution.params.delta1 == doctest::Approx(-c.evolution.params.g * c.evolution.params.g));
  CHECK(c.evolution.dt == 0.02);
  const auto has = [&](const std::string& k) {
    for (const auto& d : c.defaulted) {
      if (d == k) return true;
    }
    return false;
  };
  CHECK(has("model.g_wm"));
  CHECK(has("model.delta1_wm"));
  CHECK(has("evolution.dt_per_wm"));
  CHECK_FALSE(has("darkstate.n_max"));
  CHECK_FALSE(has("evolution.t_final_per_wm"));
}

TEST_CASE("resolved config survives a json round trip") {
  RunConfig a = parse_run_config(kFlagship);
  a.evolution.params.gamma_m = 1e-5;
  a.g_deviation = 0.03;
  const nlohmann::json j = to_json(a);
  const RunConfig b = parse_run_config(j.dump(2), "json");
  CHECK(to_json(b) == j);
  const RunConfig c = parse_run_config(nlohmann::json{{"config", j}}.dump(), "sidecar");
  CHECK(to_json(c) == j);
}

TEST_CASE("gn command") {
  auto r = cli({"gn", "--n", "1"});
  CHECK(r.code == kExitOk);
  CHECK(lines(r.out) == std::vector<std::string>{"N,g_N", "1,1.000000000000"});
  r = cli({"gn", "--n", "10"});
  CHECK(lines(r.out).at(1).rfind("10,0.3712", 0) == 0);
  r = cli({"gn", "--max-n", "100"});
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 101);
  double prev = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i], ',');
    CHECK(std::stoi(f[0]) == static_cast<int>(i));
    const double g = std::stod(f[1]);
    CHECK(g < prev);
    prev = g;
  }
  CHECK(cli({"gn", "--n", "0"}).code == kExitConfig);
  CHECK(cli({"gn", "--n", "3", "--max-n", "4"}).code == kExitConfig);
  CHECK(cli({"gn"}).code == kExitConfig);
}

TEST_CASE("darkstate command") {
  auto r = cli({"darkstate", "--n", "10", "--ratio", "3", "--ratio-convention", "2/1"});
  REQUIRE(r.code == kExitOk);
  auto rows = lines(r.out);
  CHECK(rows.front() == "p,beta,P");
  CHECK(rows.back().rfind("# mean=", 0) == 0);
  double prev = 2.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double p = std::stod(split(rows[i], ',')[2]);
    CHECK(p < prev);
    prev = p;
  }

  r = cli({"darkstate", "--n", "10", "--ratio", "0", "--ratio-convention", "1/2"});
  rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == "0,1,1");
  CHECK(rows[2].find("fano=,") != std::string::npos);

  r = cli({"darkstate", "--n", "3", "--ratio", "2", "--ratio-convention", "1/2"});
  const std::string summary = lines(r.out).back();
  const auto pos = summary.find("fano=") + 5;
  CHECK(std::stod(summary.substr(pos)) < 1.0);

  CHECK(cli({"darkstate", "--n", "3", "--ratio", "2", "--ratio-convention", "3/1"}).code == kExitConfig);
  CHECK(cli({"darkstate", "--n", "3", "--ratio", "2"}).code == kExitConfig);
}

TEST_CASE("fano-sweep command") {
  auto r = cli({"fano-sweep", "--n", "3", "--ratio-min", "0", "--ratio-max", "3", "--steps", "7"});
  REQUIRE(r.code == kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == "ratio,mean,fano");
  CHECK(rows[1] == "0,0,");
  double prev = 1.0;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double f = std::stod(split(rows[i], ',')[2]);
    CHECK(f < prev);
    prev = f;
  }
  r = cli({"fano-sweep", "--n", "3", "--ratio-min", "0.5", "--ratio-max", "3", "--steps", "3", "--log"});
  CHECK(lines(r.out).at(1).rfind("0.5,", 0) == 0);
  CHECK(lines(r.out).at(3).rfind("3,", 0) == 0);
  CHECK(cli({"fano-sweep", "--n", "3", "--ratio-min", "3", "--ratio-max", "1", "--steps", "4"}).code == kExitConfig);
  CHECK(cli({"fano-sweep", "--n", "3", "--ratio-min", "1", "--ratio-max", "1", "--steps", "4"}).code == kExitConfig);
}

TEST_CASE("validate command") {
  TempDir dir("validate");
  const fs::path cfg = dir.path / "flagship.ini";
  spit(cfg, kFlagship);
  auto r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("margin=0.2738") != std::string::npos);
  CHECK(r.out.find("omega_max/margin=0.0365") != std::string::npos);
  CHECK(lines(r.out).back() == "PASS");

  r = cli({"validate", "--config", cfg.string(), "--max-drive-ratio", "0.01"});
  CHECK(r.code == kExitInvalid);
  CHECK(r.out.find("EXCEEDED") != std::string::npos);

  std::string text = kFlagship;
  text.replace(text.find("g_wm = 0.37"), 11, "g_wm = 0.7071067811865476");
  text.replace(text.find("delta1_wm = -0.14"), 17, "delta1_wm = -0.5");
  text.replace(text.find("delta2_wm = -1.14"), 17, "delta2_wm = -1.5");
  spit(cfg, text);
  r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == kExitInvalid);
  CHECK(r.out.find("margin=0.0000") != std::string::npos);
  CHECK(lines(r.out).back() == "FAIL");

  text = kFlagship;
  text.replace(text.find("delta1_wm = -0.14"), 17, "delta1_wm = 0.14");
  spit(cfg, text);
  r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == kExitInvalid);
  CHECK(r.out.find("MISMATCH") != std::string::npos);

  spit(cfg, "[darkstate]\nn_max = 3\nbogus = 1\n");
  r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find(":3:") != std::string::npos);
  CHECK(cli({"validate", "--config", (dir.path / "missing.ini").string()}).code == kExitConfig);
}

TEST_CASE("evolve writes csv and a sidecar that reproduces the run") {
  TempDir dir("evolve");
  const fs::path cfg = dir.path / "run.ini";
  spit(cfg, short_run(dir.path));
  auto r = cli({"evolve", "--config", cfg.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir.path / "run.csv");
  const auto rows = lines(csv);
  CHECK(rows.front() == kTimeSeriesHeader);
  CHECK(rows.size() == 12);
  CHECK(csv.find('\r') == std::string::npos);

  const auto meta = nlohmann::json::parse(slurp(dir.path / "run.json"));
  CHECK(meta["schema"] == "optodark.run.v1");
  CHECK(meta["csv_schema"] == kTimeSeriesSchema);
  CHECK(meta["abort"].is_null());
  CHECK(meta["wall_seconds"].get<double>() >= 0.0);
  CHECK(meta["config"]["model"]["n_phonon_levels"] == 8);
  CHECK_FALSE(meta["defaulted"].empty());

  r = cli({"evolve", "--config", (dir.path / "run.json").string(), "--csv", (dir.path / "again.csv").string(),
           "--metadata", (dir.path / "again.json").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(dir.path / "again.csv") == csv);
  const auto meta2 = nlohmann::json::parse(slurp(dir.path / "again.json"));
  auto c1 = meta["config"], c2 = meta2["config"];
  c1["output"] = c2["output"] = nullptr;
  CHECK(c1 == c2);

  r = cli({"evolve", "--config", cfg.string(), "--gamma-m", "1e-3", "--csv", (dir.path / "damped.csv").string(),
           "--metadata", (dir.path / "damped.json").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(dir.path / "damped.csv") != csv);
  CHECK(nlohmann::json::parse(slurp(dir.path / "damped.json"))["config"]["model"]["gamma_m_wm"] == 1e-3);
}

TEST_CASE("zero drive gives a flat fidelity column") {
  TempDir dir("flat");
  std::string text = short_run(dir.path);
  text.replace(text.find("omega1_wm = 0.0033333333333333335"), 33, "omega1_wm = 0");
  text.replace(text.find("omega2_wm = 0.01"), 16, "omega2_wm = 0");
  spit(dir.path / "run.ini", text);
  REQUIRE(cli({"evolve", "--config", (dir.path / "run.ini").string()}).code == kExitOk);
  const auto rows = lines(slurp(dir.path / "run.csv"));
  REQUIRE(rows.size() > 2);
  const std::string first = split(rows[1], ',')[1];
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(split(rows[i], ',')[1] == first);
}

TEST_CASE("numerical abort exits 4 and still writes metadata") {
  TempDir dir("abort");
  std::string text = short_run(dir.path);
  text.replace(text.find("gamma_c_wm = 0.05"), 17, "gamma_c_wm = 40");
  text.replace(text.find("sample_every = 100"), 18, "sample_every = 10\ndt_per_wm = 0.1");
  spit(dir.path / "run.ini", text);
  const auto r = cli({"evolve", "--config", (dir.path / "run.ini").string()});
  CHECK(r.code == kExitNumerical);
  CHECK(r.err.find("reduce dt") != std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(dir.path / "run.json"));
  CHECK(meta["abort"].is_string());
}

TEST_CASE("sweep grid parsing") {
  const SweepGrid g = parse_grid("ratio=2,3;gamma_m=0,1e-5,1e-4");
  CHECK(g.size() == 6);
  const auto c = g.coordinates(4);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == 3.0);
  CHECK(c[1] == 1e-5);
  CHECK_THROWS(parse_grid("ratio=2;ratio=3"));
  CHECK_THROWS(parse_grid("omega=1"));
  CHECK_THROWS(parse_grid("ratio="));
}

TEST_CASE("sweep output does not depend on the worker count") {
  TempDir dir("sweep");
  const fs::path cfg = dir.path / "base.ini";
  spit(cfg, short_run(dir.path));
  const std::string grid = "ratio=2,3;gamma_m=0,1e-4";
  auto r1 = cli({"sweep", "--config", cfg.string(), "--grid", grid, "--jobs", "1", "--out-dir", (dir.path / "k1").string()});
  auto r4 = cli({"sweep", "--config", cfg.string(), "--grid", grid, "--jobs", "4", "--out-dir", (dir.path / "k4").string()});
  REQUIRE(r1.code == kExitOk);
  REQUIRE(r4.code == kExitOk);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "k1")) {
    ++files;
    CAPTURE(e.path());
    CHECK(slurp(e.path()) == slurp(dir.path / "k4" / e.path().filename()));
  }
  CHECK(files == 5);
  const auto index = lines(slurp(dir.path / "k1" / "index.csv"));
  CHECK(index.front() == "point,ratio,gamma_m,path,status,final_F,message");
  CHECK(index.size() == 5);

  r1 = cli({"sweep", "--config", cfg.string(), "--grid", "ratio=3", "--jobs", "1", "--out-dir", (dir.path / "one1").string()});
  r4 = cli({"sweep", "--config", cfg.string(), "--grid", "ratio=3", "--jobs", "4", "--out-dir", (dir.path / "one4").string()});
  CHECK(slurp(dir.path / "one1" / "point_0000.csv") == slurp(dir.path / "one4" / "point_0000.csv"));
  CHECK(slurp(dir.path / "one1" / "index.csv") == slurp(dir.path / "one4" / "index.csv"));
}

TEST_CASE("a failing sweep point is recorded without stopping the sweep") {
  TempDir dir("sweepfail");
  std::string text = short_run(dir.path);
  text.replace(text.find("sample_every = 100"), 18, "sample_every = 10\ndt_per_wm = 0.1");
  spit(dir.path / "base.ini", text);
  const auto r = cli({"sweep", "--config", (dir.path / "base.ini").string(), "--grid", "gamma_c=0.05,40", "--jobs", "2",
                      "--out-dir", (dir.path / "out").string()});
  CHECK(r.code == kExitNumerical);
  const auto index = lines(slurp(dir.path / "out" / "index.csv"));
  REQUIRE(index.size() == 3);
  CHECK(split(index[1], ',')[3] == "ok");
  CHECK(split(index[2], ',')[3] == "abort");
  CHECK(split(index[2], ',')[2].empty());
  CHECK(fs::exists(dir.path / "out" / "point_0000.csv"));
  CHECK_FALSE(fs::exists(dir.path / "out" / "point_0001.csv"));
}

TEST_CASE("installed binary reports usage errors") {
  const char* exe = std::getenv("OPTODARK_CLI");
  if (exe == nullptr) return;
  const std::string cmd = std::string(exe) + " no-such-command > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == kExitConfig);
}
