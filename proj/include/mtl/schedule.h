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

#ifndef MTL_SCHEDULE_H_
#define MTL_SCHEDULE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtl {

// Number of learner update steps between rotations; empty means the
// assignment never rotates.
class SwitchPeriod {
 public:
  static SwitchPeriod Infinite() { return SwitchPeriod(); }
  static SwitchPeriod Every(std::uint64_t steps);

  bool infinite() const { return !steps_.has_value(); }
  std::uint64_t steps() const { return *steps_; }

  // "inf" or a positive integer.
  std::string ToString() const;
  static SwitchPeriod Parse(std::string_view text);

  friend bool operator==(const SwitchPeriod&, const SwitchPeriod&) = default;

 private:
  SwitchPeriod() = default;
  std::optional<std::uint64_t> steps_;
};

enum class ScheduleKind { kIndependent, kSequential, kTwoTimescale, kMultiTimescale };

std::string_view ScheduleKindName(ScheduleKind kind);

// Multi-timescale learning-rate assignment. Agents are split into clusters
// c^0..c^{H-1} of the given sizes; cluster h trains with levels[h]
// (levels[0] is the fast rate). Every `period` update steps the assignment
// rotates by one agent over the fixed agent ordering.
class Schedule {
 public:
  // Throws kInvalidSchedule on n == 0, empty or mismatched levels/sizes,
  // sizes not summing to n, zero cluster sizes, or negative/non-finite rates.
  Schedule(std::size_t n, std::vector<double> levels,
           std::vector<std::size_t> cluster_sizes, SwitchPeriod period);

  // H = 2 with cluster sizes (1, n - 1).
  static Schedule FastSlow(std::size_t n, double fast, double slow,
                           SwitchPeriod period);
  // A single rate shared by every agent.
  static Schedule Constant(std::size_t n, double rate);

  std::size_t num_agents() const { return n_; }
  std::size_t num_levels() const { return levels_.size(); }
  const std::vector<double>& levels() const { return levels_; }
  const std::vector<std::size_t>& cluster_sizes() const { return cluster_sizes_; }
  const SwitchPeriod& period() const { return period_; }

  // Rotation offset applied at update step t: floor(t / s) mod n.
  std::size_t Rotation(std::uint64_t t) const;

  // Level index held by each agent at update step t.
  std::vector<std::size_t> Assignment(std::uint64_t t) const;
  std::size_t LevelOf(std::uint64_t t, std::size_t agent) const;

  double LearningRate(std::uint64_t t, std::size_t agent) const;
  std::vector<double> Rates(std::uint64_t t) const;

  ScheduleKind Classify() const;

 private:
  std::size_t n_;
  std::vector<double> levels_;
  std::vector<std::size_t> cluster_sizes_;
  SwitchPeriod period_;
  // Level of agent i at rotation 0.
  std::vector<std::size_t> base_level_;
};

}  // namespace mtl

#endif  // MTL_SCHEDULE_H_
