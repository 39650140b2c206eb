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

#ifndef MTL_RNG_H_
#define MTL_RNG_H_

#include <cstdint>
#include <random>

namespace mtl {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named sub-streams of one master seed. Each (stream, index) pair maps to an
// independent seed, so adding agents never shifts the env or eval streams.
enum class Stream : std::uint64_t {
  kEnv = 1,
  kExplore = 2,
  kEval = 3,
  kSampling = 4,
};

constexpr std::uint64_t DeriveSeed(std::uint64_t master, Stream stream,
                                   std::uint64_t index = 0) {
  return Mix64(Mix64(master ^ Mix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Rng MakeRng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(DeriveSeed(master, stream, index));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t UniformBelow(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace mtl

#endif  // MTL_RNG_H_
