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

#include "mtl/br_dynamics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "mtl/error.h"

namespace mtl {

TeamGame::TeamGame(std::vector<int> action_counts, std::vector<double> payoff)
    : action_counts_(std::move(action_counts)), payoff_(std::move(payoff)) {
  if (action_counts_.empty()) {
    throw Error(ErrorKind::kInvalidProblem, "game needs at least one agent");
  }
  std::size_t total = 1;
  strides_.assign(action_counts_.size(), 1);
  for (std::size_t i = action_counts_.size(); i-- > 0;) {
    if (action_counts_[i] <= 0) {
      throw Error(ErrorKind::kInvalidProblem, "action counts must be positive");
    }
    strides_[i] = total;
    total *= static_cast<std::size_t>(action_counts_[i]);
  }
  if (payoff_.size() != total) {
    throw Error(ErrorKind::kInvalidProblem,
                "payoff has " + std::to_string(payoff_.size()) +
                    " entries, expected " + std::to_string(total));
  }
  for (double v : payoff_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidProblem, "payoff entries must be finite");
    }
  }
}

std::size_t TeamGame::FlatIndex(const std::vector<int>& actions) const {
  if (actions.size() != action_counts_.size()) {
    throw Error(ErrorKind::kIndex, "profile length does not match agent count");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= action_counts_[i]) {
      throw Error(ErrorKind::kIndex, "action " + std::to_string(actions[i]) +
                                         " out of range for agent " +
                                         std::to_string(i));
    }
    flat += strides_[i] * static_cast<std::size_t>(actions[i]);
  }
  return flat;
}

std::vector<int> TeamGame::Unflatten(std::size_t flat) const {
  std::vector<int> actions(action_counts_.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    actions[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return actions;
}

TeamGame TeamGame::Parse(std::istream& in) {
  std::stringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    cleaned << line << '\n';
  }
  long long n = 0;
  if (!(cleaned >> n) || n <= 0) {
    throw Error(ErrorKind::kInvalidConfig, "game file: bad agent count");
  }
  std::vector<int> counts(static_cast<std::size_t>(n));
  std::size_t total = 1;
  for (auto& c : counts) {
    if (!(cleaned >> c) || c <= 0) {
      throw Error(ErrorKind::kInvalidConfig, "game file: bad action count");
    }
    total *= static_cast<std::size_t>(c);
  }
  std::vector<double> payoff(total);
  for (auto& v : payoff) {
    if (!(cleaned >> v)) {
      throw Error(ErrorKind::kInvalidConfig,
                  "game file: expected " + std::to_string(total) + " payoffs");
    }
  }
  std::string extra;
  if (cleaned >> extra) {
    throw Error(ErrorKind::kInvalidConfig, "game file: trailing token " + extra);
  }
  return TeamGame(std::move(counts), std::move(payoff));
}

TeamGame TeamGame::ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open game file " + path);
  return Parse(in);
}

std::string FormatProfile(const ActionProfile& profile) {
  std::string out;
  for (std::size_t i = 0; i < profile.actions.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(profile.actions[i]);
  }
  return out;
}

std::string_view DynamicsStatusName(DynamicsStatus status) {
  switch (status) {
    case DynamicsStatus::kConverged: return "Converged";
    case DynamicsStatus::kCycle: return "Cycle";
    case DynamicsStatus::kMaxRounds: return "MaxRounds";
  }
  return "Unknown";
}

double TeamPayoff(const TeamGame& game, const ActionProfile& profile) {
  return game.payoff()[game.FlatIndex(profile.actions)];
}

int BestResponse(const TeamGame& game, const ActionProfile& profile,
                 std::size_t agent, TieBreak tie_break) {
  if (agent >= game.num_agents()) {
    throw Error(ErrorKind::kIndex, "agent index out of range");
  }
  ActionProfile probe = profile;
  const int current = profile.actions[agent];
  int best = 0;
  double best_value = 0.0;
  for (int a = 0; a < game.action_counts()[agent]; ++a) {
    probe.actions[agent] = a;
    const double v = TeamPayoff(game, probe);
    if (a == 0 || v > best_value) {
      best = a;
      best_value = v;
    }
  }
  if (tie_break == TieBreak::kKeepCurrent) {
    probe.actions[agent] = current;
    if (TeamPayoff(game, probe) == best_value) return current;
  }
  return best;
}

ActionProfile IibrStep(const TeamGame& game, const ActionProfile& profile,
                       TieBreak tie_break) {
  ActionProfile next = profile;
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    next.actions[i] = BestResponse(game, profile, i, tie_break);
  }
  return next;
}

ActionProfile SibrStep(const TeamGame& game, const ActionProfile& profile,
                       std::size_t agent, TieBreak tie_break) {
  ActionProfile next = profile;
  next.actions[agent] = BestResponse(game, profile, agent, tie_break);
  return next;
}

namespace {

ActionProfile Round(const TeamGame& game, BrMode mode,
                    const ActionProfile& profile, TieBreak tie_break,
                    std::vector<double>* update_payoffs) {
  if (mode == BrMode::kIibr) return IibrStep(game, profile, tie_break);
  ActionProfile p = profile;
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    p = SibrStep(game, p, i, tie_break);
    if (update_payoffs) update_payoffs->push_back(TeamPayoff(game, p));
  }
  return p;
}

}  // namespace

DynamicsTrace RunDynamics(const TeamGame& game, BrMode mode,
                          const ActionProfile& initial, std::size_t max_rounds,
                          TieBreak tie_break) {
  if (max_rounds < 1) {
    throw Error(ErrorKind::kInvalidConfig, "max_rounds must be >= 1");
  }
  DynamicsTrace trace;
  trace.mode = mode;
  trace.profiles.push_back(initial);
  trace.payoffs.push_back(TeamPayoff(game, initial));
  // Visited profiles keyed by flat joint-action index.
  std::map<std::size_t, std::size_t> first_seen{{game.FlatIndex(initial.actions), 0}};

  for (std::size_t round = 1; round <= max_rounds; ++round) {
    const ActionProfile next =
        Round(game, mode, trace.profiles.back(), tie_break, nullptr);
    if (next == trace.profiles.back()) {
      trace.status = DynamicsStatus::kConverged;
      // Round after which the profile is final; a start at a fixed point is
      // confirmed by round 1.
      trace.converged_round = std::max<std::size_t>(1, trace.profiles.size() - 1);
      return trace;
    }
    const std::size_t key = game.FlatIndex(next.actions);
    trace.profiles.push_back(next);
    trace.payoffs.push_back(TeamPayoff(game, next));
    const auto [it, inserted] = first_seen.emplace(key, round);
    if (!inserted) {
      trace.status = DynamicsStatus::kCycle;
      trace.cycle_start = it->second;
      trace.cycle_period = round - it->second;
      return trace;
    }
  }
  trace.status = DynamicsStatus::kMaxRounds;
  return trace;
}

std::vector<double> SibrUpdatePayoffs(const TeamGame& game,
                                      const ActionProfile& initial,
                                      std::size_t max_rounds,
                                      TieBreak tie_break) {
  std::vector<double> payoffs{TeamPayoff(game, initial)};
  ActionProfile p = initial;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    ActionProfile next = Round(game, BrMode::kSibr, p, tie_break, &payoffs);
    if (next == p) break;
    p = std::move(next);
  }
  return payoffs;
}

bool IsAgentByAgentOptimal(const TeamGame& game, const ActionProfile& profile) {
  const double base = TeamPayoff(game, profile);
  ActionProfile probe = profile;
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    for (int a = 0; a < game.action_counts()[i]; ++a) {
      probe.actions[i] = a;
      if (TeamPayoff(game, probe) > base) return false;
    }
    probe.actions[i] = profile.actions[i];
  }
  return true;
}

}  // namespace mtl
