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

#ifndef MTL_HARNESS_H_
#define MTL_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtl/config.h"
#include "mtl/learners.h"

namespace mtl {

// Min-max normalization of per-algorithm returns on one task. Throws
// kDegenerateRange when every return is equal.
std::map<std::string, double> NormalizeReturns(
    const std::map<std::string, double>& returns);

struct Aggregate {
  double mean = 0.0;
  double median = 0.0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

// scores[algorithm][task] -> mean and median across tasks per algorithm.
// Throws kMismatchedTasks unless every algorithm covers the same tasks.
std::map<std::string, Aggregate> AggregateScores(
    const std::map<std::string, std::map<std::string, double>>& scores);

// Percentage of the CTDE - DT gap closed by the multi-timescale method.
// Throws kDegenerateGap when ctde == dt.
double GapRecovered(double dt, double mdt, double ctde);

// Trailing moving average; the first window - 1 points average the
// available prefix. Throws kEmptyInput on an empty curve.
std::vector<double> Smooth(std::span<const double> curve, std::size_t window = 5);

// Sample standard deviation over sqrt(count); 0 for fewer than two values.
double StandardError(std::span<const double> values);

// Trapezoidal area under the smoothed eval curve over [0, total_steps],
// holding the first value before the first eval point and the last value
// after the final one, divided by total_steps.
double Auc(std::span<const EvalPoint> points, std::uint64_t total_steps,
           std::size_t window = 5);

enum class Regime { kIndependent, kSequential, kMultiTimescale };

std::string_view RegimeName(Regime regime);

// Diagonal cells are independent learning, cells with exactly one zero rate
// are sequential, all other off-diagonal cells are multi-timescale.
Regime CellRegime(double lr0, double lr1);

struct CellResult {
  std::size_t lr0_index = 0;
  std::size_t lr1_index = 0;
  std::size_t period_index = 0;
  double lr0 = 0.0;
  double lr1 = 0.0;
  SwitchPeriod period = SwitchPeriod::Infinite();
  Regime regime = Regime::kIndependent;
  // Per seed, in config seed order.
  std::vector<RunLog> runs;
  std::vector<double> final_returns;
  std::vector<double> aucs;
  double final_mean = 0.0;
  double final_stderr = 0.0;
  double auc_mean = 0.0;
  double auc_stderr = 0.0;
  // Set when any seed failed; statistics then cover nothing.
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<double> lr0;
  std::vector<double> lr1;
  std::vector<SwitchPeriod> periods;
  std::vector<std::uint64_t> seeds;
  std::uint64_t total_steps = 0;
  std::size_t smoothing_window = 5;
  std::string digest;
  // Grid order: period-major, then lr0, then lr1.
  std::vector<CellResult> cells;
  // (cell, seed) entries before equal-rate deduplication.
  std::size_t run_entries = 0;
  // Training runs actually executed.
  std::size_t executed_runs = 0;
  // Best cell per regime by mean final return (lowest index on ties).
  std::map<Regime, std::size_t> best_final;
  std::map<Regime, std::size_t> best_auc;

  std::size_t CellIndex(std::size_t period, std::size_t i, std::size_t j) const {
    return (period * lr0.size() + i) * lr1.size() + j;
  }
};

// Fills per-cell statistics and per-regime bests from `cells[].runs`.
void Summarize(SweepResult& result);

// Trains every (lr0, lr1, s, seed) cell over `workers` threads. Equal-rate
// cells do not depend on s, so each (rate, seed) is trained once and shared
// across periods. A failing run marks its cell and the sweep continues.
SweepResult RunSweep(const ExperimentConfig& config, std::size_t workers = 1);

}  // namespace mtl

#endif  // MTL_HARNESS_H_
