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

#ifndef MTL_ENVS_H_
#define MTL_ENVS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtl/br_dynamics.h"

namespace mtl {

using Observation = std::uint64_t;

struct StepResult {
  std::vector<Observation> observations;
  double reward = 0.0;
  bool done = false;

  friend bool operator==(const StepResult&, const StepResult&) = default;
};

// Episodic cooperative environment: every agent receives its own discrete
// observation and all agents share one reward.
class CoopEnv {
 public:
  virtual ~CoopEnv() = default;

  virtual std::size_t num_agents() const = 0;
  virtual int num_actions(std::size_t agent) const = 0;
  // Observation ids lie in [0, observation_space()).
  virtual std::uint64_t observation_space() const = 0;
  virtual int horizon() const = 0;

  virtual std::vector<Observation> Reset(std::uint64_t seed) = 0;
  // Throws kInvalidAction on a malformed joint action.
  virtual StepResult Step(std::span<const int> joint_action) = 0;

  // Search support for OptimalReturn: an exact copy, and a key identifying
  // the current state apart from the step counter.
  virtual std::unique_ptr<CoopEnv> Clone() const = 0;
  virtual std::uint64_t StateKey() const = 0;
  virtual int steps_taken() const = 0;
};

using EnvFactory = std::function<std::unique_ptr<CoopEnv>()>;

// Repeated team matrix game: one state, `horizon` rounds per episode.
class MatrixGameEnv : public CoopEnv {
 public:
  MatrixGameEnv(TeamGame game, int horizon);

  std::size_t num_agents() const override { return game_.num_agents(); }
  int num_actions(std::size_t agent) const override {
    return game_.action_counts()[agent];
  }
  std::uint64_t observation_space() const override { return 1; }
  int horizon() const override { return horizon_; }

  std::vector<Observation> Reset(std::uint64_t seed) override;
  StepResult Step(std::span<const int> joint_action) override;

  std::unique_ptr<CoopEnv> Clone() const override;
  std::uint64_t StateKey() const override { return 0; }
  int steps_taken() const override { return t_; }

  const TeamGame& game() const { return game_; }

 private:
  TeamGame game_;
  int horizon_;
  int t_ = 0;
};

struct GridPos {
  int row = 0;
  int col = 0;

  friend bool operator==(const GridPos&, const GridPos&) = default;
};

enum ForagingAction : int {
  kUp = 0,
  kDown = 1,
  kLeft = 2,
  kRight = 3,
  kStay = 4,
  kLoad = 5,
};
inline constexpr int kNumForagingActions = 6;

struct ForagingConfig {
  int width = 5;
  int height = 5;
  std::vector<int> agent_levels;
  std::vector<int> food_levels;
  // Fixed layout; when absent, positions are drawn from the reset seed.
  std::optional<std::vector<GridPos>> agent_positions;
  std::optional<std::vector<GridPos>> food_positions;
  int horizon = 25;
  bool cooperative_only = false;
  // Radius of the square view window; empty means full observability.
  std::optional<int> view_radius;

  // Rows of '.', 'A'.. for agents (in index order) and '1'..'9' for foods
  // with that level. Foods are indexed in reading order.
  static ForagingConfig FromAscii(const std::vector<std::string>& rows,
                                  std::vector<int> agent_levels, int horizon,
                                  bool cooperative_only);
};

struct ForagingState {
  std::vector<GridPos> agents;
  std::vector<GridPos> foods;
  std::vector<bool> food_alive;
  int t = 0;

  friend bool operator==(const ForagingState&, const ForagingState&) = default;
};

// Simplified level-based foraging. Movement is resolved agent by agent in
// index order: a move succeeds when the target is inside the grid, holds no
// uncollected food and no agent (using positions already updated this step).
// After movement, each remaining food (in index order) is collected when the
// agents 4-adjacent to it that chose kLoad have a level sum >= its level.
// Collecting a food pays level / total food level, so a perfect episode
// returns 1.
class ForagingEnv : public CoopEnv {
 public:
  // Throws kInvalidConfig on a bad layout, horizon < 1, an unsolvable food,
  // or a food that a single agent could load under cooperative_only.
  explicit ForagingEnv(ForagingConfig config);

  std::size_t num_agents() const override { return config_.agent_levels.size(); }
  int num_actions(std::size_t) const override { return kNumForagingActions; }
  std::uint64_t observation_space() const override { return obs_space_; }
  int horizon() const override { return config_.horizon; }

  std::vector<Observation> Reset(std::uint64_t seed) override;
  StepResult Step(std::span<const int> joint_action) override;

  std::unique_ptr<CoopEnv> Clone() const override;
  std::uint64_t StateKey() const override;
  int steps_taken() const override { return state_.t; }

  const ForagingConfig& config() const { return config_; }
  const ForagingState& state() const { return state_; }
  void set_state(ForagingState state) { state_ = std::move(state); }

  // Observation of `agent` in an arbitrary state.
  Observation Observe(const ForagingState& state, std::size_t agent) const;
  double RemainingFoodMass(const ForagingState& state) const;

 private:
  int CellIndex(GridPos p) const { return p.row * config_.width + p.col; }
  bool InGrid(GridPos p) const;
  // Values one food contributes to the full-observability encoding: alive
  // or not for a fixed layout, otherwise its cell or "collected".
  std::uint64_t FoodCardinality() const;
  std::uint64_t EncodeFull(const ForagingState& state) const;

  ForagingConfig config_;
  int total_food_level_ = 0;
  std::uint64_t obs_space_ = 0;
  ForagingState state_;
};

// Maximum undiscounted episode return reachable from the env's current
// state by exhaustive search over joint actions. Throws kSearchBudget when
// more than `budget` state-action expansions would be needed.
double OptimalReturn(const CoopEnv& env, std::uint64_t budget = 10'000'000);

}  // namespace mtl

#endif  // MTL_ENVS_H_
