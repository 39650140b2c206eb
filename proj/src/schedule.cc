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

#include "mtl/schedule.h"

#include <charconv>
#include <cmath>
#include <numeric>

#include "mtl/error.h"

namespace mtl {

SwitchPeriod SwitchPeriod::Every(std::uint64_t steps) {
  if (steps == 0) {
    throw Error(ErrorKind::kInvalidSchedule, "switch period must be positive");
  }
  SwitchPeriod p;
  p.steps_ = steps;
  return p;
}

std::string SwitchPeriod::ToString() const {
  return infinite() ? "inf" : std::to_string(*steps_);
}

SwitchPeriod SwitchPeriod::Parse(std::string_view text) {
  if (text == "inf" || text == "Infinite" || text == "infinite") return Infinite();
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kInvalidSchedule,
                "bad switch period '" + std::string(text) + "'");
  }
  return Every(v);
}

std::string_view ScheduleKindName(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kIndependent: return "Independent";
    case ScheduleKind::kSequential: return "Sequential";
    case ScheduleKind::kTwoTimescale: return "TwoTimescale";
    case ScheduleKind::kMultiTimescale: return "MultiTimescale";
  }
  return "Unknown";
}

Schedule::Schedule(std::size_t n, std::vector<double> levels,
                   std::vector<std::size_t> cluster_sizes, SwitchPeriod period)
    : n_(n),
      levels_(std::move(levels)),
      cluster_sizes_(std::move(cluster_sizes)),
      period_(period) {
  if (n_ == 0) throw Error(ErrorKind::kInvalidSchedule, "schedule needs n >= 1");
  if (levels_.empty()) {
    throw Error(ErrorKind::kInvalidSchedule, "schedule needs at least one level");
  }
  if (levels_.size() != cluster_sizes_.size()) {
    throw Error(ErrorKind::kInvalidSchedule,
                "levels and cluster_sizes differ in length");
  }
  for (double rate : levels_) {
    if (!std::isfinite(rate) || rate < 0.0) {
      throw Error(ErrorKind::kInvalidSchedule,
                  "learning rates must be finite and >= 0");
    }
  }
  for (std::size_t size : cluster_sizes_) {
    if (size == 0) {
      throw Error(ErrorKind::kInvalidSchedule, "cluster sizes must be positive");
    }
  }
  const std::size_t total =
      std::accumulate(cluster_sizes_.begin(), cluster_sizes_.end(), std::size_t{0});
  if (total != n_) {
    throw Error(ErrorKind::kInvalidSchedule,
                "cluster sizes sum to " + std::to_string(total) + ", expected " +
                    std::to_string(n_));
  }
  base_level_.reserve(n_);
  for (std::size_t h = 0; h < cluster_sizes_.size(); ++h) {
    base_level_.insert(base_level_.end(), cluster_sizes_[h], h);
  }
}

Schedule Schedule::FastSlow(std::size_t n, double fast, double slow,
                            SwitchPeriod period) {
  if (n == 1) return Schedule(1, {fast}, {1}, period);
  return Schedule(n, {fast, slow}, {1, n - 1}, period);
}

Schedule Schedule::Constant(std::size_t n, double rate) {
  return Schedule(n, {rate}, {n}, SwitchPeriod::Infinite());
}

std::size_t Schedule::Rotation(std::uint64_t t) const {
  if (period_.infinite()) return 0;
  return static_cast<std::size_t>((t / period_.steps()) % n_);
}

std::size_t Schedule::LevelOf(std::uint64_t t, std::size_t agent) const {
  const std::size_t r = Rotation(t);
  return base_level_[(agent + n_ - r) % n_];
}

std::vector<std::size_t> Schedule::Assignment(std::uint64_t t) const {
  std::vector<std::size_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = LevelOf(t, i);
  return out;
}

double Schedule::LearningRate(std::uint64_t t, std::size_t agent) const {
  if (agent >= n_) throw Error(ErrorKind::kIndex, "agent index out of range");
  return levels_[LevelOf(t, agent)];
}

std::vector<double> Schedule::Rates(std::uint64_t t) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = levels_[LevelOf(t, i)];
  return out;
}

ScheduleKind Schedule::Classify() const {
  bool all_equal = true;
  for (double rate : levels_) all_equal = all_equal && rate == levels_.front();
  if (all_equal) return ScheduleKind::kIndependent;
  if (levels_.size() == 2 && cluster_sizes_[0] == 1 && levels_[1] == 0.0 &&
      !period_.infinite()) {
    return ScheduleKind::kSequential;
  }
  if (period_.infinite()) return ScheduleKind::kTwoTimescale;
  return ScheduleKind::kMultiTimescale;
}

}  // namespace mtl
