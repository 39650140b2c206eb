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

#include "mtl/reports.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mtl/error.h"

namespace mtl {

namespace {

std::string Num(double v, int digits = 10) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string Exact(double v) { return Num(v, 17); }

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

std::string Sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return text;
}

struct CurveStats {
  std::vector<std::uint64_t> steps;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

CurveStats CellCurve(const CellResult& cell, std::size_t window) {
  CurveStats stats;
  if (cell.runs.empty()) return stats;
  std::vector<std::vector<double>> smoothed;
  for (const auto& run : cell.runs) {
    std::vector<double> values;
    for (const auto& p : run.eval_points) values.push_back(p.mean_return);
    smoothed.push_back(values.empty() ? values : Smooth(values, window));
  }
  const auto& points = cell.runs.front().eval_points;
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<double> at;
    for (const auto& s : smoothed) at.push_back(s[k]);
    double mean = 0.0;
    for (double v : at) mean += v;
    mean /= static_cast<double>(at.size());
    stats.steps.push_back(points[k].step);
    stats.mean.push_back(mean);
    stats.stderr_.push_back(StandardError(at));
  }
  return stats;
}

// Linear blue-to-yellow ramp.
std::string HeatColor(double t) {
  if (std::isnan(t)) return "#cccccc";
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + t * (250 - 40)));
  const int g = static_cast<int>(std::lround(40 + t * (230 - 40)));
  const int b = static_cast<int>(std::lround(120 + t * (60 - 120)));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string HeatmapSvg(const SweepResult& result, std::size_t p) {
  const std::size_t rows = result.lr0.size();
  const std::size_t cols = result.lr1.size();
  constexpr int kCell = 60, kLeft = 70, kTop = 40;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& c = result.cells[result.CellIndex(p, i, j)];
      if (c.error) continue;
      lo = std::min(lo, c.final_mean);
      hi = std::max(hi, c.final_mean);
    }
  }
  std::ostringstream svg;
  const int width = kLeft + static_cast<int>(cols) * kCell + 20;
  const int height = kTop + static_cast<int>(rows) * kCell + 20;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << kLeft << "\" y=\"15\">final return, s = "
      << result.periods[p].ToString() << " (rows lr0, columns lr1)</text>\n";
  for (std::size_t j = 0; j < cols; ++j) {
    svg << "<text x=\"" << kLeft + static_cast<int>(j) * kCell + 5 << "\" y=\"" << kTop - 5
        << "\">" << Num(result.lr1[j], 4) << "</text>\n";
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = kTop + static_cast<int>(i) * kCell;
    svg << "<text x=\"5\" y=\"" << y + kCell / 2 << "\">" << Num(result.lr0[i], 4) << "</text>\n";
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& c = result.cells[result.CellIndex(p, i, j)];
      const double t = c.error ? std::nan("") : (hi > lo ? (c.final_mean - lo) / (hi - lo) : 1.0);
      const int x = kLeft + static_cast<int>(j) * kCell;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"" << HeatColor(t) << "\" stroke=\"white\"/>\n";
      svg << "<text x=\"" << x + 8 << "\" y=\"" << y + kCell / 2 + 4 << "\">"
          << (c.error ? "error" : Num(c.final_mean, 3)) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string CurvesSvg(const SweepResult& result) {
  constexpr int kWidth = 640, kHeight = 360, kPad = 50;
  static const char* kColors[] = {"#1f77b4", "#2ca02c", "#d62728"};
  std::vector<std::pair<Regime, CurveStats>> curves;
  for (const auto& [regime, index] : result.best_final) {
    curves.emplace_back(regime, CellCurve(result.cells[index], result.smoothing_window));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [regime, c] : curves) {
    for (std::size_t k = 0; k < c.mean.size(); ++k) {
      lo = std::min(lo, c.mean[k] - c.stderr_[k]);
      hi = std::max(hi, c.mean[k] + c.stderr_[k]);
    }
  }
  if (!(hi > lo)) {
    lo = std::isfinite(lo) ? lo - 1.0 : 0.0;
    hi = lo + 2.0;
  }
  const double xmax = static_cast<double>(std::max<std::uint64_t>(result.total_steps, 1));
  auto px = [&](double step) { return kPad + step / xmax * (kWidth - 2 * kPad); };
  auto py = [&](double v) { return kHeight - kPad - (v - lo) / (hi - lo) * (kHeight - 2 * kPad); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kHeight - kPad << "\" x2=\"" << kWidth - kPad
      << "\" y2=\"" << kHeight - kPad << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
      << kHeight - kPad << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"5\" y=\"" << kPad << "\">" << Num(hi, 3) << "</text>\n";
  svg << "<text x=\"5\" y=\"" << kHeight - kPad << "\">" << Num(lo, 3) << "</text>\n";
  svg << "<text x=\"" << kWidth - kPad - 40 << "\" y=\"" << kHeight - kPad + 20 << "\">"
      << result.total_steps << "</text>\n";
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& [regime, c] = curves[ci];
    const char* color = kColors[ci % 3];
    if (c.mean.empty()) continue;
    std::ostringstream band, line;
    for (std::size_t k = 0; k < c.mean.size(); ++k) {
      band << Num(px(static_cast<double>(c.steps[k])), 6) << ","
           << Num(py(c.mean[k] + c.stderr_[k]), 6) << " ";
      line << Num(px(static_cast<double>(c.steps[k])), 6) << "," << Num(py(c.mean[k]), 6) << " ";
    }
    for (std::size_t k = c.mean.size(); k-- > 0;) {
      band << Num(px(static_cast<double>(c.steps[k])), 6) << ","
           << Num(py(c.mean[k] - c.stderr_[k]), 6) << " ";
    }
    svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kPad - 120 << "\" y=\"" << kPad + 15 * static_cast<int>(ci)
        << "\" fill=\"" << color << "\">" << RegimeName(regime) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string GainSvg(const SweepResult& result) {
  constexpr int kWidth = 360, kHeight = 240, kPad = 40;
  std::vector<std::pair<std::string, double>> bars;
  const auto base = result.best_final.find(Regime::kIndependent);
  if (base != result.best_final.end()) {
    const auto& b = result.cells[base->second];
    for (Regime r : {Regime::kSequential, Regime::kMultiTimescale}) {
      const auto it = result.best_final.find(r);
      if (it == result.best_final.end()) continue;
      const auto& c = result.cells[it->second];
      bars.emplace_back(std::string(RegimeName(r)),
                        RelativeGain(c.final_mean, c.final_stderr, b.final_mean, b.final_stderr).value);
    }
  }
  double extent = 0.0;
  for (const auto& [name, v] : bars) {
    if (std::isfinite(v)) extent = std::max(extent, std::abs(v));
  }
  if (extent == 0.0) extent = 1.0;
  const double mid = kHeight / 2.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"5\" y=\"15\">relative gain over best independent cell</text>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << mid << "\" x2=\"" << kWidth - kPad << "\" y2=\""
      << mid << "\" stroke=\"black\"/>\n";
  for (std::size_t k = 0; k < bars.size(); ++k) {
    const double v = std::isfinite(bars[k].second) ? bars[k].second : 0.0;
    const double h = std::abs(v) / extent * (mid - kPad);
    const int x = kPad + 20 + static_cast<int>(k) * 120;
    svg << "<rect x=\"" << x << "\" y=\"" << Num(v >= 0 ? mid - h : mid, 6) << "\" width=\"80\" height=\""
        << Num(h, 6) << "\" fill=\"" << (v >= 0 ? "#2ca02c" : "#d62728") << "\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << kHeight - 10 << "\">" << bars[k].first << " "
        << Num(bars[k].second, 3) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

Gain RelativeGain(double best, double best_stderr, double baseline,
                  double baseline_stderr) {
  if (baseline == 0.0) return {std::nan(""), std::nan("")};
  const double denom = std::abs(baseline);
  return {(best - baseline) / denom,
          std::sqrt(best_stderr * best_stderr + baseline_stderr * baseline_stderr) / denom};
}

std::string RunsCsvPath(const std::string& out_dir, const std::string& digest) {
  return (std::filesystem::path(out_dir) / ("runs_" + digest + ".csv")).string();
}

std::string RunsCsv(const SweepResult& result) {
  std::string out = "cell,lr0,lr1,s,seed,step,value\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    const std::string prefix = std::to_string(c) + "," + Exact(cell.lr0) + "," +
                               Exact(cell.lr1) + "," + cell.period.ToString() + ",";
    if (cell.error) {
      out += prefix + ",error," + Sanitize(*cell.error) + "\n";
      continue;
    }
    for (const auto& run : cell.runs) {
      const std::string head = prefix + std::to_string(run.seed) + ",";
      for (const auto& p : run.eval_points) {
        out += head + std::to_string(p.step) + "," + Exact(p.mean_return) + "\n";
      }
      out += head + "final," + Exact(run.final_return) + "\n";
    }
  }
  return out;
}

std::string HeatmapCsv(const SweepResult& result, std::size_t period_index, bool auc) {
  std::string out = "lr0\\lr1";
  for (double lr : result.lr1) out += "," + Num(lr);
  out += "\n";
  for (std::size_t i = 0; i < result.lr0.size(); ++i) {
    out += Num(result.lr0[i]);
    for (std::size_t j = 0; j < result.lr1.size(); ++j) {
      const auto& cell = result.cells[result.CellIndex(period_index, i, j)];
      out += ",";
      out += cell.error ? "error" : Num(auc ? cell.auc_mean : cell.final_mean);
    }
    out += "\n";
  }
  return out;
}

std::string CurvesCsv(const SweepResult& result) {
  std::string out = "step,mean_return,stderr,regime,lr0,lr1,s\n";
  for (const auto& cell : result.cells) {
    if (cell.error) continue;
    const CurveStats stats = CellCurve(cell, result.smoothing_window);
    const std::string tail = "," + std::string(RegimeName(cell.regime)) + "," + Num(cell.lr0) +
                             "," + Num(cell.lr1) + "," + cell.period.ToString() + "\n";
    for (std::size_t k = 0; k < stats.steps.size(); ++k) {
      out += std::to_string(stats.steps[k]) + "," + Num(stats.mean[k]) + "," +
             Num(stats.stderr_[k]) + tail;
    }
  }
  return out;
}

std::string GainCsv(const SweepResult& result) {
  std::string out = "metric,regime,baseline,value,baseline_value,gain,gain_stderr,lr0,lr1,s\n";
  for (bool auc : {false, true}) {
    const auto& best = auc ? result.best_auc : result.best_final;
    const auto base_it = best.find(Regime::kIndependent);
    if (base_it == best.end()) continue;
    const auto& base = result.cells[base_it->second];
    const double base_value = auc ? base.auc_mean : base.final_mean;
    const double base_se = auc ? base.auc_stderr : base.final_stderr;
    for (Regime r : {Regime::kMultiTimescale, Regime::kSequential}) {
      const auto it = best.find(r);
      if (it == best.end()) continue;
      const auto& c = result.cells[it->second];
      const double value = auc ? c.auc_mean : c.final_mean;
      const double se = auc ? c.auc_stderr : c.final_stderr;
      const Gain g = RelativeGain(value, se, base_value, base_se);
      out += std::string(auc ? "auc" : "final") + "," + std::string(RegimeName(r)) +
             ",independent," + Num(value) + "," + Num(base_value) + "," + Num(g.value) + "," +
             Num(g.stderr_) + "," + Num(c.lr0) + "," + Num(c.lr1) + "," + c.period.ToString() + "\n";
    }
  }
  return out;
}

std::vector<std::string> EmitReports(const SweepResult& result, const std::string& out_dir,
                                     bool plots) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  const std::string& d = result.digest;
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::string path = (dir / name).string();
    WriteFile(path, text);
    written.push_back(path);
  };
  emit("runs_" + d + ".csv", RunsCsv(result));
  for (std::size_t p = 0; p < result.periods.size(); ++p) {
    const std::string s = result.periods[p].ToString();
    emit("heatmap_final_s" + s + "_" + d + ".csv", HeatmapCsv(result, p, false));
    emit("heatmap_auc_s" + s + "_" + d + ".csv", HeatmapCsv(result, p, true));
    if (plots) emit("heatmap_final_s" + s + "_" + d + ".svg", HeatmapSvg(result, p));
  }
  emit("curves_" + d + ".csv", CurvesCsv(result));
  emit("gain_" + d + ".csv", GainCsv(result));
  if (plots) {
    emit("curves_" + d + ".svg", CurvesSvg(result));
    emit("gain_" + d + ".svg", GainSvg(result));
  }
  return written;
}

SweepResult LoadSweep(const ExperimentConfig& config, const std::string& runs_csv) {
  if (!config.grid) throw Error(ErrorKind::kInvalidConfig, "report needs a 'schedule_grid'");
  std::ifstream in(runs_csv);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + runs_csv);
  const ScheduleGrid& grid = *config.grid;
  SweepResult result;
  result.lr0 = grid.lr0;
  result.lr1 = grid.lr1;
  result.periods = grid.periods;
  result.seeds = config.seeds;
  result.total_steps = config.training.total_steps;
  result.smoothing_window = config.smoothing_window;
  result.digest = config.digest;
  std::map<std::pair<std::size_t, std::size_t>, bool> equal_seen;
  for (std::size_t p = 0; p < grid.periods.size(); ++p) {
    for (std::size_t i = 0; i < grid.lr0.size(); ++i) {
      for (std::size_t j = 0; j < grid.lr1.size(); ++j) {
        CellResult cell;
        cell.lr0_index = i;
        cell.lr1_index = j;
        cell.period_index = p;
        cell.lr0 = grid.lr0[i];
        cell.lr1 = grid.lr1[j];
        cell.period = grid.periods[p];
        cell.regime = CellRegime(cell.lr0, cell.lr1);
        result.run_entries += config.seeds.size();
        const bool dup = cell.lr0 == cell.lr1 && equal_seen[{i, j}];
        if (cell.lr0 == cell.lr1) equal_seen[{i, j}] = true;
        if (!dup) result.executed_runs += config.seeds.size();
        result.cells.push_back(std::move(cell));
      }
    }
  }

  std::string line;
  std::getline(in, line);
  if (line != "cell,lr0,lr1,s,seed,step,value") {
    throw Error(ErrorKind::kIo, "unexpected runs CSV header in " + runs_csv);
  }
  std::map<std::pair<std::size_t, std::uint64_t>, std::size_t> run_slot;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() == 6 && line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw Error(ErrorKind::kIo, "malformed runs CSV line: " + line);
    const std::size_t c = std::stoul(f[0]);
    if (c >= result.cells.size()) throw Error(ErrorKind::kIo, "runs CSV does not match config grid");
    CellResult& cell = result.cells[c];
    if (f[5] == "error") {
      cell.error = f[6];
      continue;
    }
    const std::uint64_t seed = std::stoull(f[4]);
    auto [it, inserted] = run_slot.emplace(std::make_pair(c, seed), cell.runs.size());
    if (inserted) {
      RunLog log;
      log.seed = seed;
      log.eval_episodes = config.training.eval_episodes;
      log.config_digest = config.digest;
      cell.runs.push_back(std::move(log));
    }
    RunLog& log = cell.runs[it->second];
    if (f[5] == "final") {
      log.final_return = std::stod(f[6]);
    } else {
      log.eval_points.push_back({std::stoull(f[5]), std::stod(f[6])});
    }
  }
  Summarize(result);
  return result;
}

}  // namespace mtl
