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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "mtl/error.h"

namespace mtl {

std::map<std::string, double> NormalizeReturns(
    const std::map<std::string, double>& returns) {
  if (returns.empty()) throw Error(ErrorKind::kEmptyInput, "no returns to normalize");
  double lo = returns.begin()->second;
  double hi = lo;
  for (const auto& [name, value] : returns) {
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  if (hi == lo) {
    throw Error(ErrorKind::kDegenerateRange, "all returns are equal; range is zero");
  }
  std::map<std::string, double> out;
  for (const auto& [name, value] : returns) out[name] = (value - lo) / (hi - lo);
  return out;
}

std::map<std::string, Aggregate> AggregateScores(
    const std::map<std::string, std::map<std::string, double>>& scores) {
  std::map<std::string, Aggregate> out;
  const std::map<std::string, double>* reference = nullptr;
  for (const auto& [algorithm, per_task] : scores) {
    if (per_task.empty()) {
      throw Error(ErrorKind::kEmptyInput, "algorithm " + algorithm + " has no tasks");
    }
    if (reference) {
      const bool same = per_task.size() == reference->size() &&
                        std::equal(per_task.begin(), per_task.end(), reference->begin(),
                                   [](const auto& a, const auto& b) { return a.first == b.first; });
      if (!same) {
        throw Error(ErrorKind::kMismatchedTasks,
                    "algorithm " + algorithm + " covers a different task set");
      }
    }
    reference = &per_task;
    std::vector<double> values;
    for (const auto& [task, v] : per_task) values.push_back(v);
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    Aggregate agg;
    agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(k);
    agg.median = k % 2 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
    out[algorithm] = agg;
  }
  return out;
}

double GapRecovered(double dt, double mdt, double ctde) {
  if (ctde == dt) {
    throw Error(ErrorKind::kDegenerateGap, "CTDE and DT scores coincide; gap is zero");
  }
  return (mdt - dt) * 100.0 / (ctde - dt);
}

std::vector<double> Smooth(std::span<const double> curve, std::size_t window) {
  if (curve.empty()) throw Error(ErrorKind::kEmptyInput, "cannot smooth an empty curve");
  if (window < 1) throw Error(ErrorKind::kInvalidConfig, "smoothing window must be >= 1");
  std::vector<double> out(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    // Incremental mean keeps constant stretches bit-exact.
    double mean = 0.0;
    for (std::size_t k = first; k <= i; ++k) {
      mean += (curve[k] - mean) / static_cast<double>(k - first + 1);
    }
    out[i] = mean;
  }
  return out;
}

double StandardError(std::span<const double> values) {
  const std::size_t k = values.size();
  if (k < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(k - 1)) / std::sqrt(static_cast<double>(k));
}

double Auc(std::span<const EvalPoint> points, std::uint64_t total_steps,
           std::size_t window) {
  if (points.empty()) throw Error(ErrorKind::kEmptyInput, "no eval points");
  if (total_steps == 0) throw Error(ErrorKind::kInvalidConfig, "total_steps must be > 0");
  std::vector<double> values;
  for (const auto& p : points) values.push_back(p.mean_return);
  const auto smoothed = Smooth(values, window);
  double area = smoothed.front() * static_cast<double>(points.front().step);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = static_cast<double>(points[i].step - points[i - 1].step);
    area += 0.5 * (smoothed[i] + smoothed[i - 1]) * dx;
  }
  if (points.back().step < total_steps) {
    area += smoothed.back() * static_cast<double>(total_steps - points.back().step);
  }
  return area / static_cast<double>(total_steps);
}

std::string_view RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kIndependent: return "independent";
    case Regime::kSequential: return "sequential";
    case Regime::kMultiTimescale: return "multi_timescale";
  }
  return "unknown";
}

Regime CellRegime(double lr0, double lr1) {
  if (lr0 == lr1) return Regime::kIndependent;
  if (lr0 == 0.0 || lr1 == 0.0) return Regime::kSequential;
  return Regime::kMultiTimescale;
}

void Summarize(SweepResult& result) {
  result.best_final.clear();
  result.best_auc.clear();
  for (auto& cell : result.cells) {
    cell.final_returns.clear();
    cell.aucs.clear();
    cell.final_mean = cell.final_stderr = cell.auc_mean = cell.auc_stderr = 0.0;
    if (cell.error) continue;
    for (const auto& run : cell.runs) {
      cell.final_returns.push_back(run.final_return);
      cell.aucs.push_back(Auc(run.eval_points, result.total_steps, result.smoothing_window));
    }
    const double k = static_cast<double>(cell.runs.size());
    cell.final_mean = std::accumulate(cell.final_returns.begin(), cell.final_returns.end(), 0.0) / k;
    cell.auc_mean = std::accumulate(cell.aucs.begin(), cell.aucs.end(), 0.0) / k;
    cell.final_stderr = StandardError(cell.final_returns);
    cell.auc_stderr = StandardError(cell.aucs);
  }
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    if (cell.error) continue;
    auto consider = [&](std::map<Regime, std::size_t>& best, double value, auto metric) {
      const auto it = best.find(cell.regime);
      if (it == best.end() || value > metric(result.cells[it->second])) best[cell.regime] = c;
    };
    consider(result.best_final, cell.final_mean, [](const CellResult& r) { return r.final_mean; });
    consider(result.best_auc, cell.auc_mean, [](const CellResult& r) { return r.auc_mean; });
  }
}

SweepResult RunSweep(const ExperimentConfig& config, std::size_t workers) {
  if (!config.grid) {
    throw Error(ErrorKind::kInvalidConfig, "sweep needs a 'schedule_grid'");
  }
  const ScheduleGrid& grid = *config.grid;
  const EnvFactory factory = MakeEnvFactory(config.env);
  const std::size_t n = factory()->num_agents();

  SweepResult result;
  result.lr0 = grid.lr0;
  result.lr1 = grid.lr1;
  result.periods = grid.periods;
  result.seeds = config.seeds;
  result.total_steps = config.training.total_steps;
  result.smoothing_window = config.smoothing_window;
  result.digest = config.digest;

  // Unique training jobs; equal-rate cells reuse the job of the first period.
  struct Job {
    double lr0, lr1;
    SwitchPeriod period;
    std::uint64_t seed;
    RunLog log;
    std::optional<std::string> error;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<std::size_t>> cell_jobs;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> equal_rate_first_cell;

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

        std::vector<std::size_t> ids;
        const bool equal_rates = cell.lr0 == cell.lr1;
        const auto key = std::make_pair(i, j);
        if (equal_rates && equal_rate_first_cell.count(key)) {
          ids = cell_jobs[equal_rate_first_cell.at(key)];
        } else {
          for (std::uint64_t seed : config.seeds) {
            ids.push_back(jobs.size());
            jobs.push_back({cell.lr0, cell.lr1, cell.period, seed, {}, {}});
          }
          if (equal_rates) equal_rate_first_cell[key] = result.cells.size();
        }
        cell_jobs.push_back(std::move(ids));
        result.cells.push_back(std::move(cell));
      }
    }
  }
  result.executed_runs = jobs.size();

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t id = next.fetch_add(1);
      if (id >= jobs.size()) return;
      Job& job = jobs[id];
      try {
        const Schedule schedule = Schedule::FastSlow(n, job.lr0, job.lr1, job.period);
        job.log = Train(factory, schedule, config.q, config.training, job.seed);
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    auto& cell = result.cells[c];
    for (std::size_t id : cell_jobs[c]) {
      if (jobs[id].error && !cell.error) cell.error = jobs[id].error;
      cell.runs.push_back(jobs[id].log);
    }
    if (cell.error) cell.runs.clear();
  }
  Summarize(result);
  return result;
}

}  // namespace mtl
