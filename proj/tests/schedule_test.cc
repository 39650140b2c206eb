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

#include <random>

#include "doctest.h"
#include "mtl/error.h"

namespace mtl {
namespace {

TEST_CASE("Schedule construction") {
  const Schedule three(3, {0.01, 0.001}, {1, 2}, SwitchPeriod::Every(100));
  CHECK(three.num_levels() == 2);
  CHECK(three.Classify() == ScheduleKind::kMultiTimescale);

  const Schedule equal(2, {0.1, 0.1}, {1, 1}, SwitchPeriod::Every(10));
  CHECK(equal.Classify() == ScheduleKind::kIndependent);

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  CHECK(kind_of([] { Schedule(3, {0.1, 0.2}, {2, 2}, SwitchPeriod::Every(5)); }) ==
        ErrorKind::kInvalidSchedule);
  CHECK(kind_of([] { Schedule(3, {0.1, -0.2}, {1, 2}, SwitchPeriod::Every(5)); }) ==
        ErrorKind::kInvalidSchedule);
  CHECK(kind_of([] { Schedule(0, {0.1}, {0}, SwitchPeriod::Every(5)); }) ==
        ErrorKind::kInvalidSchedule);
  CHECK(kind_of([] { Schedule(3, {0.1, 0.2}, {3}, SwitchPeriod::Every(5)); }) ==
        ErrorKind::kInvalidSchedule);
  CHECK(kind_of([] { SwitchPeriod::Every(0); }) == ErrorKind::kInvalidSchedule);
}

TEST_CASE("SwitchPeriod text form") {
  CHECK(SwitchPeriod::Parse("inf").infinite());
  CHECK(SwitchPeriod::Parse("250").steps() == 250);
  CHECK(SwitchPeriod::Every(10).ToString() == "10");
  CHECK(SwitchPeriod::Infinite().ToString() == "inf");
  CHECK_THROWS_AS(SwitchPeriod::Parse("ten"), Error);
  CHECK_THROWS_AS(SwitchPeriod::Parse("0"), Error);
}

TEST_CASE("Assignment rotates the fast agent every s steps") {
  const Schedule s(3, {0.01, 0.001}, {1, 2}, SwitchPeriod::Every(100));
  CHECK(s.Assignment(0) == std::vector<std::size_t>{0, 1, 1});
  CHECK(s.Assignment(150) == std::vector<std::size_t>{1, 0, 1});
  CHECK(s.Assignment(250) == std::vector<std::size_t>{1, 1, 0});
  CHECK(s.Assignment(300) == s.Assignment(0));
  CHECK(s.LearningRate(50, 0) == 0.01);
  CHECK(s.LearningRate(50, 1) == 0.001);
  CHECK(s.LearningRate(199, 1) == 0.01);

  const Schedule frozen(3, {0.01, 0.001}, {1, 2}, SwitchPeriod::Infinite());
  for (std::uint64_t t : {0ull, 1ull, 99ull, 100000ull, 123456789ull}) {
    CHECK(frozen.Assignment(t) == frozen.Assignment(0));
  }
  CHECK(frozen.Classify() == ScheduleKind::kTwoTimescale);
}

TEST_CASE("General H rotates the whole level assignment") {
  const Schedule s(5, {0.3, 0.2, 0.1}, {1, 2, 2}, SwitchPeriod::Every(4));
  CHECK(s.Assignment(0) == std::vector<std::size_t>{0, 1, 1, 2, 2});
  CHECK(s.Assignment(4) == std::vector<std::size_t>{2, 0, 1, 1, 2});
  CHECK(s.Assignment(8) == std::vector<std::size_t>{2, 2, 0, 1, 1});
  CHECK(s.Assignment(20) == s.Assignment(0));
}

TEST_CASE("Classify follows the reductions") {
  CHECK(Schedule::FastSlow(4, 0.1, 0.1, SwitchPeriod::Every(7)).Classify() ==
        ScheduleKind::kIndependent);
  CHECK(Schedule::FastSlow(4, 0.1, 0.0, SwitchPeriod::Every(7)).Classify() ==
        ScheduleKind::kSequential);
  CHECK(Schedule::FastSlow(4, 0.1, 0.01, SwitchPeriod::Every(1000)).Classify() ==
        ScheduleKind::kMultiTimescale);
  CHECK(Schedule::FastSlow(4, 0.1, 0.0, SwitchPeriod::Infinite()).Classify() ==
        ScheduleKind::kTwoTimescale);
  CHECK(Schedule::Constant(3, 0.2).Classify() == ScheduleKind::kIndependent);
}

TEST_CASE("Scheduler invariants over random configurations") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> agents(2, 8);
  std::uniform_int_distribution<std::uint64_t> period(1, 50);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = agents(rng);
    const std::uint64_t s = period(rng);
    const double fast = rate(rng) + 0.01;
    const double slow = rate(rng) * fast;
    const Schedule sched = Schedule::FastSlow(n, fast, slow, SwitchPeriod::Every(s));
    const std::uint64_t offset = std::uniform_int_distribution<std::uint64_t>(0, 10 * n * s)(rng);

    std::vector<std::uint64_t> fast_steps(n, 0);
    for (std::uint64_t t = offset; t < offset + n * s; ++t) {
      const auto a = sched.Assignment(t);
      std::size_t fast_count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) {
          ++fast_count;
          ++fast_steps[i];
        }
      }
      CHECK(fast_count == sched.cluster_sizes()[0]);
      CHECK(sched.Assignment(t + n * s) == a);
      CHECK(sched.Assignment(t) == sched.Assignment((t / s) * s));
    }
    for (std::uint64_t steps : fast_steps) CHECK(steps == s);

    const Schedule same = Schedule::FastSlow(n, fast, fast, SwitchPeriod::Every(s));
    const Schedule reference = Schedule::Constant(n, fast);
    CHECK(same.Classify() == ScheduleKind::kIndependent);
    const Schedule seq = Schedule::FastSlow(n, fast, 0.0, SwitchPeriod::Every(s));
    CHECK(seq.Classify() == ScheduleKind::kSequential);
    const Schedule two = Schedule::FastSlow(n, fast, slow == fast ? fast / 2 : slow,
                                            SwitchPeriod::Infinite());
    CHECK(two.Classify() == ScheduleKind::kTwoTimescale);
    for (std::uint64_t t = 0; t < 3 * n * s; ++t) {
      CHECK(same.Rates(t) == reference.Rates(t));
      std::size_t nonzero = 0;
      for (double r : seq.Rates(t)) nonzero += r != 0.0;
      CHECK(nonzero <= 1);
      CHECK(two.Assignment(t) == two.Assignment(0));
    }
  }
}

}  // namespace
}  // namespace mtl
