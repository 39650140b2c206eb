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

#ifndef MTL_LEARNERS_H_
#define MTL_LEARNERS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtl/envs.h"
#include "mtl/rng.h"
#include "mtl/schedule.h"
#include "mtl/team_estimation.h"

namespace mtl {

// Dense per-agent action-value table indexed by (observation, action).
class QTable {
 public:
  QTable(std::uint64_t num_observations, int num_actions, double initial = 0.0);

  int num_actions() const { return num_actions_; }
  std::uint64_t num_observations() const { return num_observations_; }

  std::span<const double> Row(Observation obs) const;
  double& At(Observation obs, int action);
  double At(Observation obs, int action) const;
  double MaxValue(Observation obs) const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::uint64_t num_observations_;
  int num_actions_;
  std::vector<double> values_;
};

struct Transition {
  Observation obs = 0;
  int action = 0;
  double reward = 0.0;
  Observation next_obs = 0;
  bool done = false;
};

// Q(obs, a) += lr * (target - Q(obs, a)) with target = reward, plus
// gamma * max Q(next_obs, .) when not done. lr == 0 leaves the table
// untouched.
void QUpdate(QTable& table, const Transition& tr, double lr, double gamma_discount);

// Lowest-index argmax.
int GreedyAction(std::span<const double> row);

// One uniform draw decides exploration; a second picks the random action.
int SelectAction(std::span<const double> row, double epsilon, Rng& rng);

// Linearly decayed exploration probability.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::uint64_t decay_steps = 10000;

  double At(std::uint64_t t) const;
};

struct QConfig {
  EpsilonSchedule epsilon;
  double gamma_discount = 0.95;
  double initial_q = 0.0;
};

struct TrainOptions {
  std::uint64_t total_steps = 10000;
  std::uint64_t eval_every = 1000;
  std::size_t eval_episodes = 10;
  // Number of trailing eval points averaged into final_return.
  std::size_t final_window = 5;
  std::string config_digest;
};

struct EvalPoint {
  std::uint64_t step = 0;
  double mean_return = 0.0;

  friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};

struct RunLog {
  std::uint64_t seed = 0;
  std::vector<EvalPoint> eval_points;
  double final_return = 0.0;
  std::size_t eval_episodes = 0;
  std::string config_digest;

  friend bool operator==(const RunLog&, const RunLog&) = default;
};

// Mean of the last `window` eval returns (all of them if fewer).
double FinalReturn(std::span<const EvalPoint> points, std::size_t window);

// Header "step,mean_eval_return", one row per eval point, then a
// "final,<final_return>" summary row. Values use 17 significant digits.
std::string RunLogToCsv(const RunLog& log);
void WriteRunLogCsv(const RunLog& log, const std::string& path);

// Called after every update step with the step index and the tables.
using StepObserver = std::function<void(std::uint64_t, std::span<const QTable>)>;

// Decentralized tabular Q-learning: every agent keeps its own table and at
// update step t applies QUpdate with schedule.LearningRate(t, i). Greedy
// evaluation runs on fresh envs every eval_every steps. The master seed fans
// out into env, per-agent exploration and eval streams.
RunLog Train(const EnvFactory& env_factory, const Schedule& schedule,
             const QConfig& q_config, const TrainOptions& options,
             std::uint64_t seed, const StepObserver& observer = {});

// Mean greedy return over `episodes` fresh envs seeded from `rng`.
double EvaluateGreedy(const EnvFactory& env_factory,
                      std::span<const QTable> tables, std::size_t episodes,
                      Rng& rng);

struct EstimationOptions {
  // Samples per gradient estimate; 0 uses the exact (infinite-batch)
  // gradient.
  std::size_t batch_size = 64;
  std::uint64_t total_steps = 10000;
  std::uint64_t eval_every = 100;
  std::size_t final_window = 5;
  // Initial gains; empty means all zeros.
  std::vector<double> k0;
  bool record_gains = false;
};

struct EstimationRun {
  RunLog log;  // eval returns hold team_mse
  GainVector gains;
  // Gains at step 0 and after every update step when record_gains is set.
  std::vector<GainVector> gain_trace;
};

// Stochastic-gradient learning of the linear gains. Each step draws a batch
// from x ~ N(0, 1), y_i = x + v_i, and every agent moves its gain against
// its own coordinate of the sampled team-cost gradient, scaled by the
// inverse of its own curvature 2 gamma_ii / n^2 and by its scheduled rate.
// With the exact gradient and rate 1 an update is the agent's exact best
// response.
EstimationRun TrainEstimation(const TeamEstimationProblem& problem,
                              const Schedule& schedule,
                              const EstimationOptions& options,
                              std::uint64_t seed);

// Sampled team-cost gradient at k over `batch_size` draws.
std::vector<double> SampledGradient(const TeamEstimationProblem& problem,
                                    std::span<const double> k,
                                    std::size_t batch_size, Rng& rng);

}  // namespace mtl

#endif  // MTL_LEARNERS_H_
