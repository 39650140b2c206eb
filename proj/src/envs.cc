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

#include "mtl/envs.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "mtl/error.h"
#include "mtl/rng.h"

namespace mtl {

namespace {

// Checked a * b for observation-space sizes.
std::uint64_t CheckedMul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw Error(ErrorKind::kInvalidConfig, "observation space overflows 64 bits");
  }
  return a * b;
}

void CheckJointAction(const CoopEnv& env, std::span<const int> joint_action) {
  if (joint_action.size() != env.num_agents()) {
    throw Error(ErrorKind::kInvalidAction,
                "joint action has " + std::to_string(joint_action.size()) +
                    " entries for " + std::to_string(env.num_agents()) + " agents");
  }
  for (std::size_t i = 0; i < joint_action.size(); ++i) {
    if (joint_action[i] < 0 || joint_action[i] >= env.num_actions(i)) {
      throw Error(ErrorKind::kInvalidAction,
                  "invalid action " + std::to_string(joint_action[i]) +
                      " for agent " + std::to_string(i));
    }
  }
}

}  // namespace

MatrixGameEnv::MatrixGameEnv(TeamGame game, int horizon)
    : game_(std::move(game)), horizon_(horizon) {
  if (horizon_ < 1) throw Error(ErrorKind::kInvalidConfig, "horizon must be >= 1");
}

std::vector<Observation> MatrixGameEnv::Reset(std::uint64_t) {
  t_ = 0;
  return std::vector<Observation>(num_agents(), 0);
}

StepResult MatrixGameEnv::Step(std::span<const int> joint_action) {
  CheckJointAction(*this, joint_action);
  StepResult result;
  result.reward = game_.payoff()[game_.FlatIndex(
      std::vector<int>(joint_action.begin(), joint_action.end()))];
  ++t_;
  result.done = t_ >= horizon_;
  result.observations.assign(num_agents(), 0);
  return result;
}

std::unique_ptr<CoopEnv> MatrixGameEnv::Clone() const {
  return std::make_unique<MatrixGameEnv>(*this);
}

ForagingConfig ForagingConfig::FromAscii(const std::vector<std::string>& rows,
                                         std::vector<int> agent_levels,
                                         int horizon, bool cooperative_only) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorKind::kInvalidConfig, "empty foraging grid");
  }
  ForagingConfig config;
  config.height = static_cast<int>(rows.size());
  config.width = static_cast<int>(rows.front().size());
  config.horizon = horizon;
  config.cooperative_only = cooperative_only;
  std::map<int, GridPos> agents;
  std::vector<GridPos> foods;
  for (int r = 0; r < config.height; ++r) {
    if (static_cast<int>(rows[r].size()) != config.width) {
      throw Error(ErrorKind::kInvalidConfig, "ragged foraging grid");
    }
    for (int c = 0; c < config.width; ++c) {
      const char ch = rows[r][c];
      if (ch == '.') continue;
      if (ch >= 'A' && ch <= 'Z') {
        if (!agents.emplace(ch - 'A', GridPos{r, c}).second) {
          throw Error(ErrorKind::kInvalidConfig,
                      std::string("agent ") + ch + " appears twice");
        }
      } else if (ch >= '1' && ch <= '9') {
        foods.push_back({r, c});
        config.food_levels.push_back(ch - '0');
      } else {
        throw Error(ErrorKind::kInvalidConfig,
                    std::string("unknown grid character '") + ch + "'");
      }
    }
  }
  std::vector<GridPos> agent_positions;
  for (const auto& [index, pos] : agents) {
    if (index != static_cast<int>(agent_positions.size())) {
      throw Error(ErrorKind::kInvalidConfig, "agent letters must be contiguous from A");
    }
    agent_positions.push_back(pos);
  }
  if (agent_levels.empty()) agent_levels.assign(agent_positions.size(), 1);
  config.agent_levels = std::move(agent_levels);
  config.agent_positions = std::move(agent_positions);
  config.food_positions = std::move(foods);
  return config;
}

ForagingEnv::ForagingEnv(ForagingConfig config) : config_(std::move(config)) {
  const auto& c = config_;
  if (c.width < 1 || c.height < 1) {
    throw Error(ErrorKind::kInvalidConfig, "grid dimensions must be positive");
  }
  if (c.horizon < 1) throw Error(ErrorKind::kInvalidConfig, "horizon must be >= 1");
  if (c.agent_levels.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "foraging needs at least one agent");
  }
  if (c.food_levels.empty() || c.food_levels.size() > 63) {
    throw Error(ErrorKind::kInvalidConfig, "foraging needs 1..63 foods");
  }
  const std::size_t cells = static_cast<std::size_t>(c.width) * c.height;
  if (c.agent_levels.size() + c.food_levels.size() > cells) {
    throw Error(ErrorKind::kInvalidConfig, "more entities than grid cells");
  }
  const int level_sum = std::accumulate(c.agent_levels.begin(), c.agent_levels.end(), 0);
  const int max_level = *std::max_element(c.agent_levels.begin(), c.agent_levels.end());
  for (int level : c.agent_levels) {
    if (level < 1) throw Error(ErrorKind::kInvalidConfig, "agent levels must be >= 1");
  }
  for (int level : c.food_levels) {
    if (level < 1) throw Error(ErrorKind::kInvalidConfig, "food levels must be >= 1");
    if (level > level_sum) {
      throw Error(ErrorKind::kInvalidConfig,
                  "food level " + std::to_string(level) +
                      " exceeds the team level sum (unsolvable)");
    }
    if (c.cooperative_only && level <= max_level) {
      throw Error(ErrorKind::kInvalidConfig,
                  "cooperative_only: a single agent could load a level " +
                      std::to_string(level) + " food");
    }
    total_food_level_ += level;
  }
  if (c.view_radius && *c.view_radius < 0) {
    throw Error(ErrorKind::kInvalidConfig, "view radius must be >= 0");
  }

  std::vector<GridPos> occupied;
  auto check_layout = [&](const std::optional<std::vector<GridPos>>& layout,
                          std::size_t expected, const char* what) {
    if (!layout) return;
    if (layout->size() != expected) {
      throw Error(ErrorKind::kInvalidConfig,
                  std::string(what) + " positions do not match their levels");
    }
    for (const GridPos& p : *layout) {
      if (!InGrid(p)) {
        throw Error(ErrorKind::kInvalidConfig, std::string(what) + " outside grid");
      }
      if (std::find(occupied.begin(), occupied.end(), p) != occupied.end()) {
        throw Error(ErrorKind::kInvalidConfig, "overlapping entities in layout");
      }
      occupied.push_back(p);
    }
  };
  check_layout(c.agent_positions, c.agent_levels.size(), "agent");
  check_layout(c.food_positions, c.food_levels.size(), "food");

  const std::size_t n = c.agent_levels.size();
  const std::size_t m = c.food_levels.size();
  if (!c.view_radius) {
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) space = CheckedMul(space, cells);
    for (std::size_t f = 0; f < m; ++f) space = CheckedMul(space, FoodCardinality());
    obs_space_ = space;
  } else {
    const std::uint64_t side = 2 * static_cast<std::uint64_t>(*c.view_radius) + 1;
    const std::uint64_t window = side * side + 1;
    std::uint64_t space = cells;
    for (std::size_t k = 0; k + 1 < n + m; ++k) space = CheckedMul(space, window);
    obs_space_ = space;
  }
  Reset(0);
}

bool ForagingEnv::InGrid(GridPos p) const {
  return p.row >= 0 && p.row < config_.height && p.col >= 0 && p.col < config_.width;
}

std::uint64_t ForagingEnv::FoodCardinality() const {
  if (config_.food_positions) return 2;
  return static_cast<std::uint64_t>(config_.width) * config_.height + 1;
}

std::vector<Observation> ForagingEnv::Reset(std::uint64_t seed) {
  const std::size_t n = config_.agent_levels.size();
  const std::size_t m = config_.food_levels.size();
  state_ = ForagingState{};
  state_.food_alive.assign(m, true);

  Rng rng(Mix64(seed));
  const int cells = config_.width * config_.height;
  std::vector<bool> taken(cells, false);
  if (config_.food_positions) {
    for (const GridPos& p : *config_.food_positions) taken[CellIndex(p)] = true;
  }
  if (config_.agent_positions) {
    for (const GridPos& p : *config_.agent_positions) taken[CellIndex(p)] = true;
  }
  auto draw = [&]() {
    for (;;) {
      const int cell = static_cast<int>(UniformBelow(rng, cells));
      if (!taken[cell]) {
        taken[cell] = true;
        return GridPos{cell / config_.width, cell % config_.width};
      }
    }
  };
  if (config_.food_positions) {
    state_.foods = *config_.food_positions;
  } else {
    for (std::size_t f = 0; f < m; ++f) state_.foods.push_back(draw());
  }
  if (config_.agent_positions) {
    state_.agents = *config_.agent_positions;
  } else {
    for (std::size_t i = 0; i < n; ++i) state_.agents.push_back(draw());
  }

  std::vector<Observation> obs(n);
  for (std::size_t i = 0; i < n; ++i) obs[i] = Observe(state_, i);
  return obs;
}

StepResult ForagingEnv::Step(std::span<const int> joint_action) {
  CheckJointAction(*this, joint_action);
  const std::size_t n = num_agents();
  const std::size_t m = config_.food_levels.size();

  auto blocked = [&](GridPos target, std::size_t self) {
    if (!InGrid(target)) return true;
    for (std::size_t f = 0; f < m; ++f) {
      if (state_.food_alive[f] && state_.foods[f] == target) return true;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j != self && state_.agents[j] == target) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    GridPos target = state_.agents[i];
    switch (joint_action[i]) {
      case kUp: --target.row; break;
      case kDown: ++target.row; break;
      case kLeft: --target.col; break;
      case kRight: ++target.col; break;
      default: continue;
    }
    if (!blocked(target, i)) state_.agents[i] = target;
  }

  StepResult result;
  for (std::size_t f = 0; f < m; ++f) {
    if (!state_.food_alive[f]) continue;
    int load = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (joint_action[i] != kLoad) continue;
      const int dist = std::abs(state_.agents[i].row - state_.foods[f].row) +
                       std::abs(state_.agents[i].col - state_.foods[f].col);
      if (dist == 1) load += config_.agent_levels[i];
    }
    if (load >= config_.food_levels[f]) {
      state_.food_alive[f] = false;
      result.reward += static_cast<double>(config_.food_levels[f]) / total_food_level_;
    }
  }
  ++state_.t;
  const bool all_collected = std::none_of(
      state_.food_alive.begin(), state_.food_alive.end(), [](bool b) { return b; });
  result.done = all_collected || state_.t >= config_.horizon;
  result.observations.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.observations[i] = Observe(state_, i);
  return result;
}

std::unique_ptr<CoopEnv> ForagingEnv::Clone() const {
  return std::make_unique<ForagingEnv>(*this);
}

std::uint64_t ForagingEnv::EncodeFull(const ForagingState& state) const {
  const std::uint64_t cells = static_cast<std::uint64_t>(config_.width) * config_.height;
  const bool fixed_food = config_.food_positions.has_value();
  std::uint64_t id = 0;
  for (const GridPos& p : state.agents) {
    id = id * cells + static_cast<std::uint64_t>(CellIndex(p));
  }
  for (std::size_t f = 0; f < state.foods.size(); ++f) {
    std::uint64_t v;
    if (fixed_food) {
      v = state.food_alive[f] ? 1 : 0;
    } else {
      v = state.food_alive[f] ? static_cast<std::uint64_t>(CellIndex(state.foods[f]))
                              : cells;
    }
    id = id * FoodCardinality() + v;
  }
  return id;
}

std::uint64_t ForagingEnv::StateKey() const { return EncodeFull(state_); }

Observation ForagingEnv::Observe(const ForagingState& state, std::size_t agent) const {
  if (!config_.view_radius) return EncodeFull(state);
  const int radius = *config_.view_radius;
  const std::uint64_t side = 2 * static_cast<std::uint64_t>(radius) + 1;
  const std::uint64_t hidden = side * side;
  const GridPos self = state.agents[agent];
  auto offset = [&](GridPos p) -> std::uint64_t {
    const int dr = p.row - self.row;
    const int dc = p.col - self.col;
    if (std::abs(dr) > radius || std::abs(dc) > radius) return hidden;
    return static_cast<std::uint64_t>(dr + radius) * side +
           static_cast<std::uint64_t>(dc + radius);
  };
  std::uint64_t id = static_cast<std::uint64_t>(CellIndex(self));
  for (std::size_t j = 0; j < state.agents.size(); ++j) {
    if (j == agent) continue;
    id = id * (hidden + 1) + offset(state.agents[j]);
  }
  for (std::size_t f = 0; f < state.foods.size(); ++f) {
    id = id * (hidden + 1) + (state.food_alive[f] ? offset(state.foods[f]) : hidden);
  }
  return id;
}

double ForagingEnv::RemainingFoodMass(const ForagingState& state) const {
  double remaining = 0.0;
  for (std::size_t f = 0; f < state.food_alive.size(); ++f) {
    if (state.food_alive[f]) remaining += config_.food_levels[f];
  }
  return remaining / total_food_level_;
}

namespace {

class ReturnSearch {
 public:
  explicit ReturnSearch(std::uint64_t budget) : budget_(budget) {}

  double Value(const CoopEnv& env) {
    const auto key = std::make_pair(env.StateKey(), env.steps_taken());
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;

    const std::size_t n = env.num_agents();
    std::vector<int> joint(n, 0);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
      if (++expansions_ > budget_) {
        throw Error(ErrorKind::kSearchBudget,
                    "optimal-return search exceeded " + std::to_string(budget_) +
                        " expansions");
      }
      auto child = env.Clone();
      const StepResult r = child->Step(joint);
      const double v = r.reward + (r.done ? 0.0 : Value(*child));
      best = std::max(best, v);
      // Next joint action, last agent fastest.
      std::size_t i = n;
      while (i-- > 0) {
        if (++joint[i] < env.num_actions(i)) break;
        joint[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    memo_.emplace(key, best);
    return best;
  }

 private:
  std::uint64_t budget_;
  std::uint64_t expansions_ = 0;
  std::map<std::pair<std::uint64_t, int>, double> memo_;
};

}  // namespace

double OptimalReturn(const CoopEnv& env, std::uint64_t budget) {
  ReturnSearch search(budget);
  return search.Value(env);
}

}  // namespace mtl
