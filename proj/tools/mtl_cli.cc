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

// Command-line entry point: oracle, brdyn, train, sweep, report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mtl/br_dynamics.h"
#include "mtl/config.h"
#include "mtl/error.h"
#include "mtl/harness.h"
#include "mtl/learners.h"
#include "mtl/reports.h"
#include "mtl/team_estimation.h"

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Writes to `path`, or stdout when empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mtl::Error(mtl::ErrorKind::kIo, "cannot write " + path);
  out << text;
}

std::string OracleReport(double p, double q, double sigma2, std::size_t n,
                         std::size_t max_sweeps, double tol) {
  const auto problem = mtl::BuildProblem(p, q, sigma2, n);
  const auto exact = mtl::SolveExact(problem);
  std::ostringstream out;
  out << "# gamma\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "#";
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : " ") << Num(problem.gamma(i, j));
    out << "\n";
  }
  out << "# eta";
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : " ") << Num(problem.eta[i]);
  out << "\n# exact_k";
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : " ") << Num(exact.k[i]);
  out << "\n";
  std::vector<mtl::IterationTrace> traces;
  for (mtl::BrMode mode : {mtl::BrMode::kIibr, mtl::BrMode::kSibr}) {
    const double rho = mtl::SpectralRadius(mtl::IterationMatrix(problem, mode));
    traces.push_back(mtl::RunBrIteration(problem, mode, mtl::GainVector{std::vector<double>(n, 0.0)},
                                         max_sweeps, tol));
    const auto& t = traces.back();
    out << "# spectral_radius_" << mtl::BrModeName(mode) << " " << Num(rho) << "\n";
    out << "# status_" << mtl::BrModeName(mode) << " " << mtl::IterationStatusName(t.status)
        << " after " << t.sweeps << " sweeps\n";
  }
  out << "sweep,mode,error\n";
  for (const auto& t : traces) {
    for (std::size_t s = 0; s < t.errors.size(); ++s) {
      out << s << "," << mtl::BrModeName(t.mode) << "," << Num(t.errors[s]) << "\n";
    }
  }
  return out.str();
}

std::string DynamicsCsv(const mtl::DynamicsTrace& trace) {
  std::string status(mtl::DynamicsStatusName(trace.status));
  if (trace.status == mtl::DynamicsStatus::kConverged) {
    status += "(round=" + std::to_string(trace.converged_round) + ")";
  } else if (trace.status == mtl::DynamicsStatus::kCycle) {
    status += "(period=" + std::to_string(trace.cycle_period) +
              " start=" + std::to_string(trace.cycle_start) + ")";
  }
  std::string out;
  for (std::size_t r = 0; r < trace.profiles.size(); ++r) {
    out += std::to_string(r) + "," + std::string(mtl::BrModeName(trace.mode)) + "," +
           mtl::FormatProfile(trace.profiles[r]) + "," + Num(trace.payoffs[r]) + "," + status +
           "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-timescale decentralized learning toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t workers = 1;
  bool no_plots = false;

  auto* oracle = app.add_subcommand("oracle", "Exact team-estimation analysis");
  double p = 1.0, q = 1.0, sigma2 = 0.5;
  std::size_t n = 3, max_sweeps = 200;
  double tol = 1e-8;
  oracle->add_option("--p", p, "Cost diagonal weight");
  oracle->add_option("--q", q, "Cost off-diagonal weight");
  oracle->add_option("--sigma2", sigma2, "Observation noise variance");
  oracle->add_option("--n", n, "Number of agents");
  oracle->add_option("--max-sweeps", max_sweeps, "Sweep budget");
  oracle->add_option("--tol", tol, "Convergence tolerance");
  oracle->add_option("--out", out, "Output file (default stdout)");

  auto* brdyn = app.add_subcommand("brdyn", "Best-response dynamics on a team game");
  std::string game_path, mode_name = "both", start_text, tie_name = "keep";
  std::size_t max_rounds = 100;
  brdyn->add_option("--game", game_path, "Game description file")->required();
  brdyn->add_option("--mode", mode_name, "iibr, sibr or both")
      ->check(CLI::IsMember({"iibr", "sibr", "both"}));
  brdyn->add_option("--start", start_text, "Initial profile, e.g. \"0 1\" (default all zeros)");
  brdyn->add_option("--max-rounds", max_rounds, "Round budget");
  brdyn->add_option("--tie-break", tie_name, "keep or lowest")
      ->check(CLI::IsMember({"keep", "lowest"}));
  brdyn->add_option("--out", out, "Output file (default stdout)");

  auto* train = app.add_subcommand("train", "Single training run to CSV");
  train->add_option("--config", config_path, "Experiment config (JSON)")->required();
  train->add_option("--seed", seed, "Master seed (default: first config seed)")
      ->each([&](const std::string&) { seed_given = true; });
  train->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Full lr0 x lr1 x s grid");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out, "Output directory (default: config out_dir)");
  sweep->add_option("--workers", workers, "Worker threads");
  sweep->add_flag("--no-plots", no_plots, "Skip SVG charts");

  auto* report = app.add_subcommand("report", "Re-render reports from stored CSVs");
  report->add_option("--config", config_path, "Experiment config (JSON)")->required();
  report->add_option("--out", out, "Directory holding the runs CSV (default: config out_dir)");
  report->add_flag("--no-plots", no_plots, "Skip SVG charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error kind=usage message=\"" << e.what() << "\"\n";
    return 2;
  }

  try {
    if (oracle->parsed()) {
      Emit(out, OracleReport(p, q, sigma2, n, max_sweeps, tol));
    } else if (brdyn->parsed()) {
      const auto game = mtl::TeamGame::ParseFile(game_path);
      mtl::ActionProfile start{std::vector<int>(game.num_agents(), 0)};
      if (!start_text.empty()) {
        std::istringstream in(start_text);
        start.actions.clear();
        int a;
        while (in >> a) start.actions.push_back(a);
        game.FlatIndex(start.actions);
      }
      const auto tie =
          tie_name == "keep" ? mtl::TieBreak::kKeepCurrent : mtl::TieBreak::kLowestIndex;
      std::string csv = "round,mode,profile,payoff,status\n";
      for (mtl::BrMode mode : {mtl::BrMode::kIibr, mtl::BrMode::kSibr}) {
        if (mode_name != "both" && mode_name != (mode == mtl::BrMode::kIibr ? "iibr" : "sibr")) {
          continue;
        }
        csv += DynamicsCsv(mtl::RunDynamics(game, mode, start, max_rounds, tie));
      }
      Emit(out, csv);
    } else if (train->parsed()) {
      const auto config = mtl::ExperimentConfig::Load(config_path);
      if (!config.schedule) {
        throw mtl::Error(mtl::ErrorKind::kInvalidConfig, "train needs a 'schedule' object");
      }
      const auto factory = mtl::MakeEnvFactory(config.env);
      const auto schedule = mtl::ScheduleFromJson(*config.schedule, factory()->num_agents());
      const std::uint64_t run_seed = seed_given ? seed : config.seeds.front();
      const auto log = mtl::Train(factory, schedule, config.q, config.training, run_seed);
      const std::string dir = out.empty() ? config.out_dir : out;
      std::filesystem::create_directories(dir);
      const std::string path = (std::filesystem::path(dir) /
                                ("run_" + config.digest + "_seed" + std::to_string(run_seed) + ".csv"))
                                   .string();
      mtl::WriteRunLogCsv(log, path);
      std::cout << path << "\n";
    } else if (sweep->parsed()) {
      const auto config = mtl::ExperimentConfig::Load(config_path);
      const auto result = mtl::RunSweep(config, workers);
      for (const auto& path : mtl::EmitReports(result, out.empty() ? config.out_dir : out, !no_plots)) {
        std::cout << path << "\n";
      }
    } else if (report->parsed()) {
      const auto config = mtl::ExperimentConfig::Load(config_path);
      const std::string dir = out.empty() ? config.out_dir : out;
      const auto result = mtl::LoadSweep(config, mtl::RunsCsvPath(dir, config.digest));
      for (const auto& path : mtl::EmitReports(result, dir, !no_plots)) std::cout << path << "\n";
    }
  } catch (const mtl::Error& e) {
    std::cerr << "error kind=" << mtl::ErrorKindName(e.kind()) << " message=\"" << e.what()
              << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error kind=internal message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
