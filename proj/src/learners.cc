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

#include "mtl/learners.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "mtl/error.h"

namespace mtl {

namespace {

constexpr std::uint64_t kMaxTableEntries = 50'000'000;

std::string FormatValue(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

QTable::QTable(std::uint64_t num_observations, int num_actions, double initial)
    : num_observations_(num_observations), num_actions_(num_actions) {
  if (num_actions <= 0 || num_observations == 0) {
    throw Error(ErrorKind::kInvalidConfig, "Q-table needs observations and actions");
  }
  if (num_observations > kMaxTableEntries / static_cast<std::uint64_t>(num_actions)) {
    throw Error(ErrorKind::kInvalidConfig,
                "Q-table too large: " + std::to_string(num_observations) +
                    " observations x " + std::to_string(num_actions) + " actions");
  }
  values_.assign(num_observations * static_cast<std::uint64_t>(num_actions), initial);
}

std::span<const double> QTable::Row(Observation obs) const {
  return std::span<const double>(values_).subspan(obs * num_actions_, num_actions_);
}

double& QTable::At(Observation obs, int action) {
  return values_[obs * num_actions_ + action];
}

double QTable::At(Observation obs, int action) const {
  return values_[obs * num_actions_ + action];
}

double QTable::MaxValue(Observation obs) const {
  const auto row = Row(obs);
  return *std::max_element(row.begin(), row.end());
}

void QUpdate(QTable& table, const Transition& tr, double lr, double gamma_discount) {
  if (lr == 0.0) return;
  double target = tr.reward;
  if (!tr.done) target += gamma_discount * table.MaxValue(tr.next_obs);
  double& q = table.At(tr.obs, tr.action);
  q += lr * (target - q);
}

int GreedyAction(std::span<const double> row) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

int SelectAction(std::span<const double> row, double epsilon, Rng& rng) {
  if (UniformUnit(rng) < epsilon) {
    return static_cast<int>(UniformBelow(rng, row.size()));
  }
  return GreedyAction(row);
}

double EpsilonSchedule::At(std::uint64_t t) const {
  if (decay_steps == 0 || t >= decay_steps) return end;
  const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
  return start + (end - start) * frac;
}

double FinalReturn(std::span<const EvalPoint> points, std::size_t window) {
  if (points.empty()) return 0.0;
  const std::size_t used = std::min(std::max<std::size_t>(window, 1), points.size());
  double sum = 0.0;
  for (std::size_t i = points.size() - used; i < points.size(); ++i) {
    sum += points[i].mean_return;
  }
  return sum / static_cast<double>(used);
}

std::string RunLogToCsv(const RunLog& log) {
  std::string out = "step,mean_eval_return\n";
  for (const auto& p : log.eval_points) {
    out += std::to_string(p.step) + "," + FormatValue(p.mean_return) + "\n";
  }
  out += "final," + FormatValue(log.final_return) + "\n";
  return out;
}

void WriteRunLogCsv(const RunLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << RunLogToCsv(log);
}

double EvaluateGreedy(const EnvFactory& env_factory,
                      std::span<const QTable> tables, std::size_t episodes,
                      Rng& rng) {
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    auto env = env_factory();
    auto obs = env->Reset(rng());
    std::vector<int> joint(env->num_agents());
    for (;;) {
      for (std::size_t i = 0; i < joint.size(); ++i) {
        joint[i] = GreedyAction(tables[i].Row(obs[i]));
      }
      StepResult r = env->Step(joint);
      total += r.reward;
      if (r.done) break;
      obs = std::move(r.observations);
    }
  }
  return episodes == 0 ? 0.0 : total / static_cast<double>(episodes);
}

RunLog Train(const EnvFactory& env_factory, const Schedule& schedule,
             const QConfig& q_config, const TrainOptions& options,
             std::uint64_t seed, const StepObserver& observer) {
  if (options.total_steps < 1) {
    throw Error(ErrorKind::kInvalidConfig, "total_steps must be >= 1");
  }
  if (options.eval_every < 1) {
    throw Error(ErrorKind::kInvalidConfig, "eval_every must be >= 1");
  }
  if (options.eval_episodes < 1) {
    throw Error(ErrorKind::kInvalidConfig, "eval_episodes must be >= 1");
  }
  if (q_config.gamma_discount < 0.0 || q_config.gamma_discount > 1.0) {
    throw Error(ErrorKind::kInvalidConfig, "gamma_discount must lie in [0, 1]");
  }
  const auto& eps = q_config.epsilon;
  if (eps.start < 0.0 || eps.start > 1.0 || eps.end < 0.0 || eps.end > 1.0) {
    throw Error(ErrorKind::kInvalidConfig, "epsilon bounds must lie in [0, 1]");
  }
  auto env = env_factory();
  const std::size_t n = env->num_agents();
  if (schedule.num_agents() != n) {
    throw Error(ErrorKind::kInvalidConfig,
                "schedule is for " + std::to_string(schedule.num_agents()) +
                    " agents, env has " + std::to_string(n));
  }

  std::vector<QTable> tables;
  std::vector<Rng> explore;
  for (std::size_t i = 0; i < n; ++i) {
    tables.emplace_back(env->observation_space(), env->num_actions(i),
                        q_config.initial_q);
    explore.push_back(MakeRng(seed, Stream::kExplore, i));
  }
  Rng env_rng = MakeRng(seed, Stream::kEnv);
  Rng eval_rng = MakeRng(seed, Stream::kEval);

  RunLog log;
  log.seed = seed;
  log.eval_episodes = options.eval_episodes;
  log.config_digest = options.config_digest;

  auto obs = env->Reset(env_rng());
  std::vector<int> joint(n);
  for (std::uint64_t t = 0; t < options.total_steps; ++t) {
    const double epsilon = eps.At(t);
    for (std::size_t i = 0; i < n; ++i) {
      joint[i] = SelectAction(tables[i].Row(obs[i]), epsilon, explore[i]);
    }
    StepResult r = env->Step(joint);
    for (std::size_t i = 0; i < n; ++i) {
      QUpdate(tables[i],
              Transition{obs[i], joint[i], r.reward, r.observations[i], r.done},
              schedule.LearningRate(t, i), q_config.gamma_discount);
    }
    if (observer) observer(t, tables);
    if (r.done) {
      obs = env->Reset(env_rng());
    } else {
      obs = std::move(r.observations);
    }
    if ((t + 1) % options.eval_every == 0) {
      log.eval_points.push_back(
          {t + 1, EvaluateGreedy(env_factory, tables, options.eval_episodes, eval_rng)});
    }
  }
  log.final_return = FinalReturn(log.eval_points, options.final_window);
  return log;
}

std::vector<double> SampledGradient(const TeamEstimationProblem& problem,
                                    std::span<const double> k,
                                    std::size_t batch_size, Rng& rng) {
  const std::size_t n = problem.n;
  std::normal_distribution<double> standard(0.0, 1.0);
  const double noise_sd = std::sqrt(problem.sigma2);
  std::vector<double> grad(n, 0.0);
  std::vector<double> y(n);
  std::vector<double> miss(n);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const double x = standard(rng);
    double miss_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x + noise_sd * standard(rng);
      miss[i] = x - k[i] * y[i];
      miss_sum += miss[i];
    }
    // d/dK_i of (1/n^2) e^T S e with e_j = x - K_j y_j:
    // -(2/n^2) y_i ((p - q) e_i + q sum_j e_j).
    for (std::size_t i = 0; i < n; ++i) {
      const double s_row = (problem.p - problem.q) * miss[i] + problem.q * miss_sum;
      grad[i] -= y[i] * s_row;
    }
  }
  const double scale =
      2.0 / (static_cast<double>(n * n) * static_cast<double>(batch_size));
  for (double& g : grad) g *= scale;
  return grad;
}

EstimationRun TrainEstimation(const TeamEstimationProblem& problem,
                              const Schedule& schedule,
                              const EstimationOptions& options,
                              std::uint64_t seed) {
  const std::size_t n = problem.n;
  if (schedule.num_agents() != n) {
    throw Error(ErrorKind::kInvalidConfig, "schedule agent count mismatch");
  }
  if (options.eval_every < 1) {
    throw Error(ErrorKind::kInvalidConfig, "eval_every must be >= 1");
  }
  EstimationRun run;
  run.gains.k = options.k0.empty() ? std::vector<double>(n, 0.0) : options.k0;
  if (run.gains.k.size() != n) {
    throw Error(ErrorKind::kInvalidConfig, "k0 has wrong length");
  }
  run.log.seed = seed;
  if (options.record_gains) run.gain_trace.push_back(run.gains);

  Rng rng = MakeRng(seed, Stream::kSampling);
  const double nn = static_cast<double>(n * n);
  for (std::uint64_t t = 0; t < options.total_steps; ++t) {
    const std::vector<double> grad =
        options.batch_size == 0 ? TeamMseGradient(problem, run.gains.k)
                                : SampledGradient(problem, run.gains.k,
                                                  options.batch_size, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double lr = schedule.LearningRate(t, i);
      if (lr == 0.0) continue;
      const double curvature = 2.0 * problem.gamma(i, i) / nn;
      run.gains.k[i] -= lr * grad[i] / curvature;
    }
    if (options.record_gains) run.gain_trace.push_back(run.gains);
    if ((t + 1) % options.eval_every == 0) {
      const bool finite = std::all_of(run.gains.k.begin(), run.gains.k.end(),
                                      [](double v) { return std::isfinite(v); });
      run.log.eval_points.push_back(
          {t + 1, finite ? TeamMse(problem, run.gains)
                         : std::numeric_limits<double>::infinity()});
    }
  }
  run.log.final_return = FinalReturn(run.log.eval_points, options.final_window);
  return run;
}

}  // namespace mtl
