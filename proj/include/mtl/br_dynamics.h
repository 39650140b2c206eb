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

#ifndef MTL_BR_DYNAMICS_H_
#define MTL_BR_DYNAMICS_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mtl/team_estimation.h"

namespace mtl {

// Finite cooperative game with a shared payoff tensor stored in row-major
// joint-action order (agent 0 is the most significant index).
class TeamGame {
 public:
  TeamGame(std::vector<int> action_counts, std::vector<double> payoff);

  std::size_t num_agents() const { return action_counts_.size(); }
  const std::vector<int>& action_counts() const { return action_counts_; }
  const std::vector<double>& payoff() const { return payoff_; }
  std::size_t num_joint_actions() const { return payoff_.size(); }

  // Row-major flat index of a joint action. Throws kIndex when out of range.
  std::size_t FlatIndex(const std::vector<int>& actions) const;
  std::vector<int> Unflatten(std::size_t flat) const;

  // Parses "n", then n action counts, then the payoff entries, all
  // whitespace separated; '#' starts a comment.
  static TeamGame Parse(std::istream& in);
  static TeamGame ParseFile(const std::string& path);

 private:
  std::vector<int> action_counts_;
  std::vector<double> payoff_;
  std::vector<std::size_t> strides_;
};

struct ActionProfile {
  std::vector<int> actions;

  friend bool operator==(const ActionProfile&, const ActionProfile&) = default;
};

std::string FormatProfile(const ActionProfile& profile);

enum class TieBreak { kLowestIndex, kKeepCurrent };

enum class DynamicsStatus { kConverged, kCycle, kMaxRounds };

std::string_view DynamicsStatusName(DynamicsStatus status);

struct DynamicsTrace {
  BrMode mode = BrMode::kIibr;
  // profiles[r] is the profile after r rounds; profiles[0] is the start.
  std::vector<ActionProfile> profiles;
  std::vector<double> payoffs;
  DynamicsStatus status = DynamicsStatus::kMaxRounds;
  // kConverged: the round whose pass left the profile unchanged.
  std::size_t converged_round = 0;
  // kCycle: profiles[cycle_start] == profiles[cycle_start + cycle_period].
  std::size_t cycle_period = 0;
  std::size_t cycle_start = 0;

  friend bool operator==(const DynamicsTrace&, const DynamicsTrace&) = default;
};

double TeamPayoff(const TeamGame& game, const ActionProfile& profile);

int BestResponse(const TeamGame& game, const ActionProfile& profile,
                 std::size_t agent, TieBreak tie_break);

ActionProfile IibrStep(const TeamGame& game, const ActionProfile& profile,
                       TieBreak tie_break);

ActionProfile SibrStep(const TeamGame& game, const ActionProfile& profile,
                       std::size_t agent, TieBreak tie_break);

// One IIBR step or one full SIBR pass over agents 0..n-1 per round. Stops on
// the first round that leaves the profile unchanged (Converged) or revisits
// an earlier profile (Cycle).
DynamicsTrace RunDynamics(const TeamGame& game, BrMode mode,
                          const ActionProfile& initial, std::size_t max_rounds,
                          TieBreak tie_break);

// Payoffs after every individual SIBR update (not just per round), starting
// with the initial payoff. Used to check monotonicity at update granularity.
std::vector<double> SibrUpdatePayoffs(const TeamGame& game,
                                      const ActionProfile& initial,
                                      std::size_t max_rounds,
                                      TieBreak tie_break);

bool IsAgentByAgentOptimal(const TeamGame& game, const ActionProfile& profile);

}  // namespace mtl

#endif  // MTL_BR_DYNAMICS_H_
