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

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mtl/error.h"

namespace mtl {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mtl::Error");
  return ErrorKind::kIo;
}

TeamGame Climbing() {
  return TeamGame({3, 3}, {11, -30, 0, -30, 7, 6, 0, 0, 5});
}

ForagingConfig PairConfig(int horizon = 25) {
  return ForagingConfig::FromAscii({".....", ".A2B.", ".....", ".....", "....."}, {1, 1},
                                   horizon, true);
}

TEST_CASE("Matrix game env pays the table entry") {
  MatrixGameEnv env(Climbing(), 2);
  CHECK(env.Reset(5) == std::vector<Observation>{0, 0});
  const int a[] = {1, 2};
  StepResult r = env.Step(a);
  CHECK(r.reward == 6.0);
  CHECK_FALSE(r.done);
  r = env.Step(a);
  CHECK(r.done);
  const int bad[] = {3, 0};
  CHECK(KindOf([&] { env.Step(bad); }) == ErrorKind::kInvalidAction);
  const int short_action[] = {0};
  CHECK(KindOf([&] { env.Step(short_action); }) == ErrorKind::kInvalidAction);
  CHECK(KindOf([] { MatrixGameEnv(Climbing(), 0); }) == ErrorKind::kInvalidConfig);
}

TEST_CASE("Two level-1 agents load a level-2 food together") {
  ForagingEnv env(PairConfig());
  env.Reset(0);
  const int load_both[] = {kLoad, kLoad};
  const StepResult r = env.Step(load_both);
  CHECK(r.reward == 1.0);
  CHECK(r.done);
  CHECK(env.RemainingFoodMass(env.state()) == 0.0);
}

TEST_CASE("A single level-1 agent cannot load a level-2 food") {
  ForagingEnv env(PairConfig());
  env.Reset(0);
  const int one[] = {kLoad, kStay};
  const StepResult r = env.Step(one);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
  CHECK(env.state().food_alive[0]);
}

TEST_CASE("Movement respects walls, food and other agents") {
  ForagingEnv env(ForagingConfig::FromAscii({"A2.", "B..", "..."}, {1, 1}, 10, true));
  env.Reset(0);
  const int up_left[] = {kUp, kLeft};
  env.Step(up_left);
  CHECK(env.state().agents[0] == GridPos{0, 0});
  CHECK(env.state().agents[1] == GridPos{1, 0});
  const int into_food[] = {kRight, kUp};
  env.Step(into_food);
  CHECK(env.state().agents[0] == GridPos{0, 0});
  CHECK(env.state().agents[1] == GridPos{1, 0});
  const int down[] = {kStay, kDown};
  env.Step(down);
  const int spread[] = {kDown, kRight};
  env.Step(spread);
  CHECK(env.state().agents[0] == GridPos{1, 0});
  CHECK(env.state().agents[1] == GridPos{2, 1});
  // Agent 0 moves first and takes the cell agent 1 was heading for.
  const int clash[] = {kDown, kLeft};
  env.Step(clash);
  CHECK(env.state().agents[0] == GridPos{2, 0});
  CHECK(env.state().agents[1] == GridPos{2, 1});
  // A cell vacated by a lower index is free for a higher one.
  const int follow[] = {kUp, kLeft};
  env.Step(follow);
  CHECK(env.state().agents[0] == GridPos{1, 0});
  CHECK(env.state().agents[1] == GridPos{2, 0});
  CHECK(env.steps_taken() == 6);
  const int bad[] = {kLoad + 1, kStay};
  CHECK(KindOf([&] { env.Step(bad); }) == ErrorKind::kInvalidAction);
}

TEST_CASE("Episode ends at the horizon") {
  ForagingEnv env(PairConfig(3));
  env.Reset(1);
  const int stay[] = {kStay, kStay};
  CHECK_FALSE(env.Step(stay).done);
  CHECK_FALSE(env.Step(stay).done);
  CHECK(env.Step(stay).done);
}

ForagingConfig RandomLayoutConfig(std::optional<int> radius = std::nullopt) {
  ForagingConfig c;
  c.width = 6;
  c.height = 5;
  c.agent_levels = {1, 2, 1};
  c.food_levels = {2, 3, 1, 4};
  c.horizon = 40;
  c.view_radius = radius;
  return c;
}

TEST_CASE("Random layouts are seeded, disjoint and in the grid") {
  ForagingEnv a(RandomLayoutConfig());
  ForagingEnv b(RandomLayoutConfig());
  std::set<std::vector<int>> layouts;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CHECK(a.Reset(seed) == b.Reset(seed));
    CHECK(a.state() == b.state());
    std::set<std::pair<int, int>> cells;
    std::vector<int> flat;
    for (const auto* group : {&a.state().agents, &a.state().foods}) {
      for (const GridPos& p : *group) {
        CHECK(p.row >= 0);
        CHECK(p.row < 5);
        CHECK(p.col >= 0);
        CHECK(p.col < 6);
        cells.insert({p.row, p.col});
        flat.push_back(p.row * 6 + p.col);
      }
    }
    CHECK(cells.size() == 7);
    layouts.insert(flat);
  }
  CHECK(layouts.size() > 40);
}

TEST_CASE("Returns are bounded and conserve food mass") {
  for (auto radius : {std::optional<int>{}, std::optional<int>{1}}) {
    ForagingEnv env(RandomLayoutConfig(radius));
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> action(0, kNumForagingActions - 1);
    double best = 0.0;
    for (std::uint64_t episode = 0; episode < 300; ++episode) {
      auto obs = env.Reset(episode);
      for (Observation o : obs) CHECK(o < env.observation_space());
      double total = 0.0;
      bool done = false;
      while (!done) {
        int joint[3];
        for (int& a : joint) a = action(rng);
        const StepResult r = env.Step(joint);
        CHECK(r.reward >= 0.0);
        for (Observation o : r.observations) CHECK(o < env.observation_space());
        total += r.reward;
        done = r.done;
      }
      CHECK(total >= 0.0);
      CHECK(total <= 1.0 + 1e-12);
      CHECK(total == doctest::Approx(1.0 - env.RemainingFoodMass(env.state())).epsilon(1e-12));
      best = std::max(best, total);
    }
    CHECK(best > 0.0);
  }
}

TEST_CASE("Clones step identically") {
  ForagingEnv env(RandomLayoutConfig());
  env.Reset(3);
  auto copy = env.Clone();
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> action(0, kNumForagingActions - 1);
  for (int t = 0; t < 40; ++t) {
    int joint[3];
    for (int& a : joint) a = action(rng);
    const StepResult x = env.Step(joint);
    const StepResult y = copy->Step(joint);
    CHECK(x == y);
    CHECK(env.StateKey() == copy->StateKey());
    if (x.done) break;
  }
}

TEST_CASE("Full observations identify the state") {
  ForagingEnv env(RandomLayoutConfig());
  std::map<Observation, ForagingState> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    env.Reset(seed);
    ForagingState s = env.state();
    s.t = 0;
    const Observation o = env.Observe(s, 0);
    CHECK(o == env.Observe(s, 2));
    auto [it, inserted] = seen.emplace(o, s);
    if (!inserted) CHECK(it->second == s);
  }
}

TEST_CASE("Partial observations depend only on the view window") {
  const int radius = 1;
  ForagingEnv env(RandomLayoutConfig(radius));
  CHECK(env.observation_space() == 30ull * 10 * 10 * 10 * 10 * 10 * 10);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> row(0, 4), col(0, 5), pick(0, 6);
  int moved_outside = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    env.Reset(seed);
    const ForagingState base = env.state();
    const GridPos self = base.agents[0];
    ForagingState changed = base;
    const int k = pick(rng);
    GridPos& target = k < 2 ? changed.agents[1 + k] : changed.foods[k - 2];
    auto outside = [&](GridPos p) {
      return std::abs(p.row - self.row) > radius || std::abs(p.col - self.col) > radius;
    };
    if (!outside(target)) continue;
    const GridPos moved{row(rng), col(rng)};
    if (!outside(moved)) continue;
    target = moved;
    ++moved_outside;
    CHECK(env.Observe(changed, 0) == env.Observe(base, 0));
    ForagingState eaten = base;
    if (k >= 2) {
      eaten.food_alive[k - 2] = false;
      CHECK(env.Observe(eaten, 0) == env.Observe(base, 0));
    }
  }
  CHECK(moved_outside > 50);

  // Something entering the window does change the view.
  ForagingEnv small(ForagingConfig{5, 5, {1, 1}, {2}, std::vector<GridPos>{{0, 0}, {4, 4}},
                                   std::vector<GridPos>{{2, 2}}, 10, true, 1});
  ForagingState s = small.state();
  const Observation before = small.Observe(s, 0);
  s.agents[1] = {1, 1};
  CHECK(small.Observe(s, 0) != before);
}

TEST_CASE("Optimal return by exhaustive search") {
  CHECK(OptimalReturn(MatrixGameEnv(TeamGame({2, 2}, {1, 0, 0, 1}), 1)) == 1.0);
  CHECK(OptimalReturn(MatrixGameEnv(Climbing(), 1)) == 11.0);
  CHECK(OptimalReturn(MatrixGameEnv(Climbing(), 3)) == 33.0);

  ForagingEnv near(ForagingConfig::FromAscii({"A..", "...", "2.B"}, {1, 1}, 3, true));
  CHECK(OptimalReturn(near) == 1.0);
  ForagingEnv too_short(ForagingConfig::FromAscii({"A..", "...", "2.B"}, {1, 1}, 1, true));
  CHECK(OptimalReturn(too_short) == 0.0);
  CHECK(KindOf([&] { OptimalReturn(near, 100); }) == ErrorKind::kSearchBudget);
}

TEST_CASE("Foraging configuration errors") {
  auto config_error = [](const std::function<void()>& fn) {
    return KindOf(fn) == ErrorKind::kInvalidConfig;
  };
  CHECK(config_error([] { ForagingConfig::FromAscii({"A.x"}, {1}, 5, false); }));
  CHECK(config_error([] { ForagingConfig::FromAscii({"A.", "."}, {1}, 5, false); }));
  CHECK(config_error([] { ForagingConfig::FromAscii({"AB", "A1"}, {}, 5, false); }));
  CHECK(config_error([] { ForagingConfig::FromAscii({"B.1"}, {1}, 5, false); }));
  // Unsolvable food, and a food one agent could load alone.
  CHECK(config_error([] { ForagingEnv(ForagingConfig::FromAscii({"A3B"}, {1, 1}, 5, false)); }));
  CHECK(config_error([] { ForagingEnv(ForagingConfig::FromAscii({"A1B"}, {1, 1}, 5, true)); }));
  CHECK(config_error([] { ForagingEnv(ForagingConfig::FromAscii({"A.."}, {1}, 5, false)); }));
  CHECK(config_error([] { ForagingEnv(ForagingConfig::FromAscii({"A1."}, {1}, 0, false)); }));
  CHECK(config_error([] {
    ForagingEnv(ForagingConfig{3, 3, {1}, {1}, std::vector<GridPos>{{0, 3}},
                               std::nullopt, 5, false, std::nullopt});
  }));
  CHECK(config_error([] {
    ForagingEnv(ForagingConfig{3, 3, {1}, {1}, std::vector<GridPos>{{1, 1}},
                               std::vector<GridPos>{{1, 1}}, 5, false, std::nullopt});
  }));
  ForagingEnv ok(ForagingConfig::FromAscii({"A1."}, {}, 5, false));
  CHECK(ok.num_agents() == 1);
  CHECK(ok.observation_space() == 3 * 2);
}

}  // namespace
}  // namespace mtl
