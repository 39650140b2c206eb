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

#include "mtl/config.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <set>

#include "mtl/br_dynamics.h"
#include "mtl/error.h"

namespace mtl {

using nlohmann::json;

namespace {

template <typename T>
T Field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T Required(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorKind::kInvalidConfig, std::string("missing field '") + key + "'");
  }
  return Field<T>(j, key, T{});
}

GridPos ParsePos(const json& j) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 2) throw Error(ErrorKind::kInvalidConfig, "positions are [row, col]");
  return {v[0], v[1]};
}

}  // namespace

EnvFactory MakeEnvFactory(const json& env_spec) {
  if (!env_spec.is_object()) throw Error(ErrorKind::kInvalidConfig, "env must be an object");
  const auto kind = Required<std::string>(env_spec, "kind");
  if (kind == "matrix_game") {
    const int horizon = Field<int>(env_spec, "horizon", 1);
    std::shared_ptr<const TeamGame> game;
    if (env_spec.contains("game_file")) {
      game = std::make_shared<const TeamGame>(
          TeamGame::ParseFile(Required<std::string>(env_spec, "game_file")));
    } else {
      game = std::make_shared<const TeamGame>(
          Required<std::vector<int>>(env_spec, "action_counts"),
          Required<std::vector<double>>(env_spec, "payoff"));
    }
    // Validate eagerly so config errors surface before any stepping.
    MatrixGameEnv probe(*game, horizon);
    return [game, horizon] { return std::make_unique<MatrixGameEnv>(*game, horizon); };
  }
  if (kind == "foraging") {
    ForagingConfig config;
    const int horizon = Field<int>(env_spec, "horizon", 25);
    const bool coop = Field<bool>(env_spec, "cooperative_only", false);
    auto agent_levels = Field<std::vector<int>>(env_spec, "agent_levels", {});
    if (env_spec.contains("grid")) {
      config = ForagingConfig::FromAscii(Required<std::vector<std::string>>(env_spec, "grid"),
                                         agent_levels, horizon, coop);
    } else {
      config.width = Required<int>(env_spec, "width");
      config.height = Required<int>(env_spec, "height");
      config.agent_levels = agent_levels;
      config.food_levels = Required<std::vector<int>>(env_spec, "food_levels");
      config.horizon = horizon;
      config.cooperative_only = coop;
      if (env_spec.contains("agent_positions")) {
        std::vector<GridPos> pos;
        for (const auto& p : env_spec.at("agent_positions")) pos.push_back(ParsePos(p));
        config.agent_positions = pos;
      }
      if (env_spec.contains("food_positions")) {
        std::vector<GridPos> pos;
        for (const auto& p : env_spec.at("food_positions")) pos.push_back(ParsePos(p));
        config.food_positions = pos;
      }
    }
    if (env_spec.contains("view_radius") && !env_spec.at("view_radius").is_null()) {
      config.view_radius = Required<int>(env_spec, "view_radius");
    }
    auto prototype = std::make_shared<const ForagingEnv>(config);
    return [prototype] { return std::make_unique<ForagingEnv>(*prototype); };
  }
  throw Error(ErrorKind::kInvalidConfig, "unknown env kind '" + kind + "'");
}

SwitchPeriod SwitchPeriodFromJson(const json& j) {
  if (j.is_string()) return SwitchPeriod::Parse(j.get<std::string>());
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() > 0)) {
    return SwitchPeriod::Every(j.get<std::uint64_t>());
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 1.0 && v == static_cast<double>(static_cast<std::uint64_t>(v))) {
      return SwitchPeriod::Every(static_cast<std::uint64_t>(v));
    }
  }
  throw Error(ErrorKind::kInvalidSchedule, "switch period must be a positive integer or \"inf\"");
}

Schedule ScheduleFromJson(const json& j, std::size_t n) {
  auto levels = Required<std::vector<double>>(j, "levels");
  std::vector<std::size_t> sizes;
  if (j.contains("cluster_sizes")) {
    sizes = Required<std::vector<std::size_t>>(j, "cluster_sizes");
  } else if (levels.size() == 1) {
    sizes = {n};
  } else if (levels.size() == 2 && n >= 2) {
    sizes = {1, n - 1};
  } else {
    throw Error(ErrorKind::kInvalidSchedule, "cluster_sizes required for this schedule");
  }
  const SwitchPeriod period = j.contains("switch_period")
                                  ? SwitchPeriodFromJson(j.at("switch_period"))
                                  : SwitchPeriod::Infinite();
  return Schedule(n, std::move(levels), std::move(sizes), period);
}

json ScheduleToJson(const Schedule& schedule) {
  json j;
  j["levels"] = schedule.levels();
  j["cluster_sizes"] = schedule.cluster_sizes();
  if (schedule.period().infinite()) {
    j["switch_period"] = "inf";
  } else {
    j["switch_period"] = schedule.period().steps();
  }
  return j;
}

QConfig QConfigFromJson(const json& j) {
  QConfig q;
  if (j.is_null()) return q;
  q.epsilon.start = Field<double>(j, "epsilon_start", q.epsilon.start);
  q.epsilon.end = Field<double>(j, "epsilon_end", q.epsilon.end);
  q.epsilon.decay_steps = Field<std::uint64_t>(j, "epsilon_decay_steps", q.epsilon.decay_steps);
  q.gamma_discount = Field<double>(j, "gamma", q.gamma_discount);
  q.initial_q = Field<double>(j, "initial_q", q.initial_q);
  return q;
}

TrainOptions TrainOptionsFromJson(const json& j) {
  TrainOptions t;
  if (j.is_null()) return t;
  t.total_steps = Field<std::uint64_t>(j, "total_steps", t.total_steps);
  t.eval_every = Field<std::uint64_t>(j, "eval_every", t.eval_every);
  t.eval_episodes = Field<std::size_t>(j, "eval_episodes", t.eval_episodes);
  t.final_window = Field<std::size_t>(j, "final_window", t.final_window);
  return t;
}

std::string ConfigDigest(const json& j) {
  json copy = j;
  if (copy.is_object()) copy.erase("out_dir");
  const std::string text = copy.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kInvalidConfig, "config must be a JSON object");
  ExperimentConfig c;
  c.raw = j;
  c.env = j.contains("env") ? j.at("env") : json();
  if (c.env.is_null()) throw Error(ErrorKind::kInvalidConfig, "missing field 'env'");
  if (j.contains("schedule_grid")) {
    const json& g = j.at("schedule_grid");
    ScheduleGrid grid;
    grid.lr0 = Required<std::vector<double>>(g, "lr0");
    grid.lr1 = Required<std::vector<double>>(g, "lr1");
    for (const auto& p : g.contains("switch_periods") ? g.at("switch_periods") : json::array()) {
      grid.periods.push_back(SwitchPeriodFromJson(p));
    }
    if (grid.lr0.empty() || grid.lr1.empty() || grid.periods.empty()) {
      throw Error(ErrorKind::kInvalidConfig, "schedule grid lists must be non-empty");
    }
    for (double lr : grid.lr0) {
      if (!(lr >= 0.0)) throw Error(ErrorKind::kInvalidConfig, "learning rates must be >= 0");
    }
    for (double lr : grid.lr1) {
      if (!(lr >= 0.0)) throw Error(ErrorKind::kInvalidConfig, "learning rates must be >= 0");
    }
    c.grid = std::move(grid);
  }
  if (j.contains("schedule")) c.schedule = j.at("schedule");
  if (!c.grid && !c.schedule) {
    throw Error(ErrorKind::kInvalidConfig, "config needs 'schedule_grid' or 'schedule'");
  }
  c.seeds = Field<std::vector<std::uint64_t>>(j, "seeds", {0});
  if (c.seeds.empty()) throw Error(ErrorKind::kInvalidConfig, "seeds must be non-empty");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    throw Error(ErrorKind::kInvalidConfig, "seeds must be distinct");
  }
  c.q = QConfigFromJson(j.contains("q") ? j.at("q") : json());
  c.training = TrainOptionsFromJson(j.contains("training") ? j.at("training") : json());
  c.smoothing_window = Field<std::size_t>(j, "smoothing_window", 5);
  if (c.smoothing_window < 1) {
    throw Error(ErrorKind::kInvalidConfig, "smoothing_window must be >= 1");
  }
  c.out_dir = Field<std::string>(j, "out_dir", "out");
  c.digest = ConfigDigest(j);
  c.training.config_digest = c.digest;
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("config parse error: ") + e.what());
  }
  return FromJson(j);
}

}  // namespace mtl
