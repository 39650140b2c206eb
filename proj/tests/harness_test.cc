// Copyright 2026 The mtl Authors. All rights reserved.
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

#include "mtl/harness.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "mtl/error.h"
#include "mtl/reports.h"

namespace mtl {
namespace {

namespace fs = std::filesystem;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mtl::Error");
  return ErrorKind::kIo;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> ReadDir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files[entry.path().filename().string()] = Slurp(entry.path());
  }
  return files;
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mtl_harness_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json SweepJson() {
  return nlohmann::json::parse(R"({
    "env": {"kind": "matrix_game", "action_counts": [3, 3],
            "payoff": [11, -30, 0, -30, 7, 6, 0, 0, 5], "horizon": 1},
    "schedule_grid": {"lr0": [0.2, 0.05], "lr1": [0.0, 0.05], "switch_periods": [10, "inf"]},
    "seeds": [0, 1, 2],
    "q": {"epsilon_start": 1.0, "epsilon_end": 0.05, "epsilon_decay_steps": 600, "gamma": 0.9},
    "training": {"total_steps": 1000, "eval_every": 100, "eval_episodes": 2},
    "out_dir": "ignored"
  })");
}

TEST_CASE("Return normalization") {
  const auto n = NormalizeReturns({{"A", 2.0}, {"B", 4.0}, {"C", 3.0}});
  CHECK(n == std::map<std::string, double>{{"A", 0.0}, {"B", 1.0}, {"C", 0.5}});
  CHECK(KindOf([] { NormalizeReturns({{"A", 5.0}, {"B", 5.0}}); }) ==
        ErrorKind::kDegenerateRange);
  CHECK(KindOf([] { NormalizeReturns({}); }) == ErrorKind::kEmptyInput);
  const std::map<std::string, double> unit{{"x", 0.0}, {"y", 0.25}, {"z", 1.0}};
  CHECK(NormalizeReturns(unit) == unit);
  CHECK(NormalizeReturns(n) == n);
}

TEST_CASE("Aggregate scores") {
  const auto agg = AggregateScores(
      {{"mt", {{"t1", 0.2}, {"t2", 0.4}, {"t3", 0.6}}}, {"ind", {{"t1", 0.1}, {"t2", 0.9}, {"t3", 0.2}}}});
  CHECK(agg.at("mt").mean == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(agg.at("mt").median == 0.4);
  CHECK(agg.at("ind").median == 0.2);
  CHECK(agg.size() == 2);
  const auto single = AggregateScores({{"a", {{"only", 0.7}}}});
  CHECK(single.at("a") == Aggregate{0.7, 0.7});
  const auto even = AggregateScores({{"a", {{"t1", 0.1}, {"t2", 0.4}}}});
  CHECK(even.at("a").median == doctest::Approx(0.25));
  CHECK(KindOf([] {
          AggregateScores({{"a", {{"t1", 0.1}, {"t2", 0.4}}}, {"b", {{"t1", 0.1}, {"t3", 0.4}}}});
        }) == ErrorKind::kMismatchedTasks);
}

TEST_CASE("Gap recovered") {
  CHECK(GapRecovered(0, 0, 1) == 0.0);
  CHECK(GapRecovered(0, 1, 1) == 100.0);
  CHECK(GapRecovered(2, 3, 6) == 25.0);
  CHECK(GapRecovered(2, 1, 6) == -25.0);
  CHECK(KindOf([] { GapRecovered(3, 4, 3); }) == ErrorKind::kDegenerateGap);
}

TEST_CASE("Trailing smoothing") {
  const std::vector<double> flat(9, 0.3);
  CHECK(Smooth(flat, 5) == flat);
  const std::vector<double> spike{0, 0, 0, 0, 5};
  CHECK(Smooth(spike, 5).back() == 1.0);
  const std::vector<double> ramp{1, 2, 3, 4};
  CHECK(Smooth(ramp, 1) == ramp);
  const auto prefix = Smooth(ramp, 3);
  CHECK(prefix[0] == 1.0);
  CHECK(prefix[1] == 1.5);
  CHECK(prefix[2] == 2.0);
  CHECK(prefix[3] == 3.0);
  CHECK(KindOf([] { Smooth(std::vector<double>{}, 5); }) == ErrorKind::kEmptyInput);
  CHECK(KindOf([&] { Smooth(ramp, 0); }) == ErrorKind::kInvalidConfig);
}

TEST_CASE("Standard error and AUC") {
  const double values[] = {1.0, 2.0, 3.0};
  CHECK(StandardError(values) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  const double one[] = {4.0};
  CHECK(StandardError(one) == 0.0);

  const EvalPoint pts[] = {{10, 1.0}, {20, 3.0}};
  CHECK(Auc(pts, 20, 1) == 1.5);
  CHECK(Auc(pts, 40, 1) == doctest::Approx((10.0 + 20.0 + 60.0) / 40.0));
  const EvalPoint flat[] = {{100, 0.7}, {200, 0.7}, {300, 0.7}};
  CHECK(Auc(flat, 300, 5) == doctest::Approx(0.7).epsilon(1e-15));

  std::vector<EvalPoint> curve;
  for (std::uint64_t s = 1; s <= 20; ++s) curve.push_back({s * 50, std::sin(0.3 * s) + 1.5});
  std::vector<EvalPoint> doubled = curve;
  for (auto& p : doubled) p.mean_return *= 2.0;
  CHECK(Auc(doubled, 1000, 5) == 2.0 * Auc(curve, 1000, 5));
}

TEST_CASE("Relative gain") {
  const Gain same = RelativeGain(0.8, 0.1, 0.8, 0.1);
  CHECK(same.value == 0.0);
  const Gain up = RelativeGain(1.5, 0.3, -1.0, 0.4);
  CHECK(up.value == 2.5);
  CHECK(up.stderr_ == doctest::Approx(0.5));
  CHECK(std::isnan(RelativeGain(1.0, 0.0, 0.0, 0.0).value));
}

TEST_CASE("Cell regimes follow the heatmap partition") {
  CHECK(CellRegime(0.1, 0.1) == Regime::kIndependent);
  CHECK(CellRegime(0.0, 0.0) == Regime::kIndependent);
  CHECK(CellRegime(0.1, 0.0) == Regime::kSequential);
  CHECK(CellRegime(0.0, 0.3) == Regime::kSequential);
  CHECK(CellRegime(0.1, 0.01) == Regime::kMultiTimescale);
}

TEST_CASE("Sweep counts, schemas and determinism") {
  const ExperimentConfig config = ExperimentConfig::FromJson(SweepJson());
  const SweepResult a = RunSweep(config, 1);
  CHECK(a.run_entries == 24);
  CHECK(a.cells.size() == 8);
  // Two equal-rate cells per period grid; the second period reuses them.
  CHECK(a.executed_runs == 24 - 3);
  CHECK(a.best_final.size() == 3);

  const fs::path dir1 = FreshDir("w1");
  const fs::path dir1b = FreshDir("w1b");
  const fs::path dir4 = FreshDir("w4");
  EmitReports(a, dir1.string(), true);
  EmitReports(RunSweep(config, 1), dir1b.string(), true);
  EmitReports(RunSweep(config, 4), dir4.string(), true);
  const auto files = ReadDir(dir1);
  CHECK(files == ReadDir(dir1b));
  CHECK(files == ReadDir(dir4));

  const std::string& d = config.digest;
  for (const std::string s : {"10", "inf"}) {
    const std::string heat = files.at("heatmap_final_s" + s + "_" + d + ".csv");
    std::istringstream rows(heat);
    std::string line;
    std::getline(rows, line);
    CHECK(line == "lr0\\lr1,0,0.05");
    int count = 0;
    while (std::getline(rows, line)) {
      ++count;
      CHECK(std::count(line.begin(), line.end(), ',') == 2);
    }
    CHECK(count == 2);
    CHECK(files.count("heatmap_auc_s" + s + "_" + d + ".csv") == 1);
    CHECK(files.count("heatmap_final_s" + s + "_" + d + ".svg") == 1);
  }
  const std::string curves = files.at("curves_" + d + ".csv");
  CHECK(curves.rfind("step,mean_return,stderr,regime,lr0,lr1,s\n", 0) == 0);
  // 8 cells x 10 eval points.
  CHECK(std::count(curves.begin(), curves.end(), '\n') == 1 + 80);
  const std::string gain = files.at("gain_" + d + ".csv");
  CHECK(gain.rfind("metric,regime,baseline,value,baseline_value,gain,gain_stderr,lr0,lr1,s\n", 0) == 0);
  CHECK(std::count(gain.begin(), gain.end(), '\n') == 5);
  CHECK(files.count("runs_" + d + ".csv") == 1);
  CHECK(files.count("curves_" + d + ".svg") == 1);
  CHECK(files.count("gain_" + d + ".svg") == 1);

  const fs::path bare = FreshDir("noplots");
  EmitReports(a, bare.string(), false);
  for (const auto& [name, text] : ReadDir(bare)) {
    CHECK(name.substr(name.size() - 4) == ".csv");
    CHECK(text == files.at(name));
  }

  const SweepResult loaded = LoadSweep(config, RunsCsvPath(dir1.string(), d));
  CHECK(HeatmapCsv(loaded, 0, false) == HeatmapCsv(a, 0, false));
  CHECK(HeatmapCsv(loaded, 1, true) == HeatmapCsv(a, 1, true));
  CHECK(CurvesCsv(loaded) == CurvesCsv(a));
  CHECK(GainCsv(loaded) == GainCsv(a));
  CHECK(RunsCsv(loaded) == RunsCsv(a));
  CHECK(loaded.best_final == a.best_final);
  CHECK(loaded.executed_runs == a.executed_runs);
}

TEST_CASE("Equal-rate runs do not depend on the switch period") {
  const ExperimentConfig config = ExperimentConfig::FromJson(SweepJson());
  const EnvFactory factory = MakeEnvFactory(config.env);
  for (double lr : {0.0, 0.05, 0.3}) {
    for (std::uint64_t seed : {0ull, 7ull}) {
      const RunLog ref = Train(factory, Schedule::FastSlow(2, lr, lr, SwitchPeriod::Infinite()),
                               config.q, config.training, seed);
      for (std::uint64_t s : {1ull, 10ull, 100ull}) {
        CHECK(Train(factory, Schedule::FastSlow(2, lr, lr, SwitchPeriod::Every(s)), config.q,
                    config.training, seed) == ref);
      }
    }
  }
}

TEST_CASE("Ties resolve to the lowest cell index; AUC scaling keeps the argmax") {
  SweepResult r;
  r.lr0 = {0.1, 0.2, 0.0};
  r.lr1 = {0.1, 0.0, 0.3};
  r.periods = {SwitchPeriod::Every(5)};
  r.seeds = {0, 1};
  r.total_steps = 100;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CellResult c;
      c.lr0_index = i;
      c.lr1_index = j;
      c.lr0 = r.lr0[i];
      c.lr1 = r.lr1[j];
      c.period = r.periods[0];
      c.regime = CellRegime(c.lr0, c.lr1);
      for (std::uint64_t seed : r.seeds) {
        RunLog log;
        log.seed = seed;
        log.eval_points = {{50, 0.5}, {100, 0.5}};
        log.final_return = 0.5;
        c.runs.push_back(log);
      }
      r.cells.push_back(c);
    }
  }
  Summarize(r);
  // Row-major order: (0.1,0.1)=0, (0.1,0.0)=1, (0.1,0.3)=2, (0.2,0.1)=3, ...
  CHECK(r.best_final.at(Regime::kIndependent) == 0);
  CHECK(r.best_final.at(Regime::kSequential) == 1);
  CHECK(r.best_final.at(Regime::kMultiTimescale) == 2);
  CHECK(r.best_auc == r.best_final);
  CHECK(r.cells[4].final_stderr == 0.0);

  // Distinct curves, then the same curves scaled by 4.
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    for (auto& run : r.cells[c].runs) {
      run.eval_points = {{50, 0.1 * c + 0.01 * run.seed}, {100, 1.0 / (1 + c)}};
    }
  }
  Summarize(r);
  SweepResult scaled = r;
  for (auto& cell : scaled.cells) {
    for (auto& run : cell.runs) {
      for (auto& p : run.eval_points) p.mean_return *= 4.0;
    }
  }
  Summarize(scaled);
  CHECK(scaled.best_auc == r.best_auc);
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    CHECK(scaled.cells[c].auc_mean == 4.0 * r.cells[c].auc_mean);
  }
}

TEST_CASE("Failed cells are recorded and the sweep continues") {
  nlohmann::json j = SweepJson();
  j["training"]["eval_episodes"] = 0;
  const SweepResult r = RunSweep(ExperimentConfig::FromJson(j), 2);
  for (const auto& cell : r.cells) {
    CHECK(cell.error.has_value());
    CHECK(cell.runs.empty());
  }
  CHECK(r.best_final.empty());
  const std::string runs = RunsCsv(r);
  CHECK(runs.find(",error,") != std::string::npos);
  CHECK(HeatmapCsv(r, 0, false).find("error") != std::string::npos);
}

TEST_CASE("Experiment config validation") {
  auto invalid = [](const std::function<void(nlohmann::json&)>& edit) {
    nlohmann::json j = SweepJson();
    edit(j);
    return KindOf([&] { ExperimentConfig::FromJson(j); }) == ErrorKind::kInvalidConfig;
  };
  CHECK(invalid([](auto& j) { j["seeds"] = {1, 1}; }));
  CHECK(invalid([](auto& j) { j["seeds"] = nlohmann::json::array(); }));
  CHECK(invalid([](auto& j) { j["schedule_grid"]["lr0"] = nlohmann::json::array(); }));
  CHECK(invalid([](auto& j) { j["schedule_grid"]["lr1"] = {-0.1}; }));
  CHECK(invalid([](auto& j) { j.erase("env"); }));
  CHECK(invalid([](auto& j) { j.erase("schedule_grid"); }));

  nlohmann::json moved = SweepJson();
  moved["out_dir"] = "elsewhere";
  CHECK(ExperimentConfig::FromJson(moved).digest ==
        ExperimentConfig::FromJson(SweepJson()).digest);
  moved["seeds"] = {0, 1, 3};
  CHECK(ExperimentConfig::FromJson(moved).digest !=
        ExperimentConfig::FromJson(SweepJson()).digest);
}

}  // namespace
}  // namespace mtl
