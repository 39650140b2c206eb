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

#ifndef MTL_CONFIG_H_
#define MTL_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtl/envs.h"
#include "mtl/learners.h"
#include "mtl/schedule.h"

namespace mtl {

// Builds a factory from an env object:
//   {"kind": "matrix_game", "action_counts": [..], "payoff": [..],
//    "horizon": H}  (or "game_file": PATH instead of counts/payoff)
//   {"kind": "foraging", "grid": ["A.2", ...], "agent_levels": [..],
//    "horizon": H, "cooperative_only": bool, "view_radius": r}
//   {"kind": "foraging", "width": W, "height": H, "agent_levels": [..],
//    "food_levels": [..], ...}  (positions drawn from the reset seed)
EnvFactory MakeEnvFactory(const nlohmann::json& env_spec);

// {"levels": [..], "cluster_sizes": [..], "switch_period": N | "inf"};
// cluster_sizes defaults to (1, n - 1) for two levels and (n) for one.
Schedule ScheduleFromJson(const nlohmann::json& j, std::size_t n);
nlohmann::json ScheduleToJson(const Schedule& schedule);

SwitchPeriod SwitchPeriodFromJson(const nlohmann::json& j);
QConfig QConfigFromJson(const nlohmann::json& j);
TrainOptions TrainOptionsFromJson(const nlohmann::json& j);

// 16 hex digits of FNV-1a over the canonical dump of `j` without "out_dir".
std::string ConfigDigest(const nlohmann::json& j);

struct ScheduleGrid {
  std::vector<double> lr0;
  std::vector<double> lr1;
  std::vector<SwitchPeriod> periods;
};

// One structured file fully determines a sweep:
//   {"env": {...}, "schedule_grid": {"lr0": [..], "lr1": [..],
//    "switch_periods": [..]}, "seeds": [..], "q": {...},
//    "training": {...}, "smoothing_window": 5, "out_dir": "..."}
// A single-run config carries "schedule" instead of (or beside)
// "schedule_grid".
struct ExperimentConfig {
  nlohmann::json raw;
  nlohmann::json env;
  std::optional<ScheduleGrid> grid;
  std::optional<nlohmann::json> schedule;
  std::vector<std::uint64_t> seeds;
  QConfig q;
  TrainOptions training;
  std::size_t smoothing_window = 5;
  std::string out_dir = "out";
  std::string digest;

  // Throws kInvalidConfig on empty grids, duplicate seeds, or bad fields.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  static ExperimentConfig Load(const std::string& path);
};

}  // namespace mtl

#endif  // MTL_CONFIG_H_
