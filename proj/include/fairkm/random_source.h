// Copyright 2026 The fairkm Authors.
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

#ifndef FAIRKM_RANDOM_SOURCE_H_
#define FAIRKM_RANDOM_SOURCE_H_

#include <cstdint>
#include <random>
#include <vector>

namespace fairkm {

// Seeded pseudo-random source shared by every stochastic operation.
//
// Draws are derived from the raw 64-bit engine output with fixed bit
// manipulation instead of <random> distributions, so a seed produces the
// same stream with any standard library.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent child stream; depends only on (seed, stream).
  RandomSource Split(std::uint64_t stream) const;

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform01();

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t UniformIndex(std::uint64_t bound);

  // `count` distinct indices from [0, population), in draw order.
  std::vector<std::size_t> SampleWithoutReplacement(std::size_t population,
                                                    std::size_t count);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; also used to derive per-cell seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

}  // namespace fairkm

#endif  // FAIRKM_RANDOM_SOURCE_H_
