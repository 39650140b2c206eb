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

#ifndef MTL_REPORTS_H_
#define MTL_REPORTS_H_

#include <string>
#include <vector>

#include "mtl/config.h"
#include "mtl/harness.h"

namespace mtl {

struct Gain {
  double value = 0.0;
  double stderr_ = 0.0;
};

// (best - baseline) / |baseline| with the two standard errors combined in
// quadrature and scaled the same way. NaN when the baseline is zero.
Gain RelativeGain(double best, double best_stderr, double baseline,
                  double baseline_stderr);

// Long-format per-run eval points:
// cell,lr0,lr1,s,seed,step,value with a "final" row per run and an "error"
// row for failed cells.
std::string RunsCsv(const SweepResult& result);

// "lr0\lr1" header followed by one row per lr0 value; `auc` selects the
// AUC statistic instead of the final return.
std::string HeatmapCsv(const SweepResult& result, std::size_t period_index, bool auc);

// step,mean_return,stderr,regime,lr0,lr1,s: per-seed curves are smoothed,
// then averaged with the standard error over seeds at every eval step.
std::string CurvesCsv(const SweepResult& result);

// metric,regime,baseline,value,baseline_value,gain,gain_stderr,lr0,lr1,s for
// the best multi-timescale and sequential cells against the best independent
// cell.
std::string GainCsv(const SweepResult& result);

// Writes runs, heatmap, curve and gain CSVs (plus SVG charts unless
// `plots` is false) named with the config digest. Returns the file paths.
std::vector<std::string> EmitReports(const SweepResult& result,
                                     const std::string& out_dir, bool plots);

std::string RunsCsvPath(const std::string& out_dir, const std::string& digest);

// Rebuilds a sweep result from the runs CSV written by EmitReports.
SweepResult LoadSweep(const ExperimentConfig& config, const std::string& runs_csv);

}  // namespace mtl

#endif  // MTL_REPORTS_H_
