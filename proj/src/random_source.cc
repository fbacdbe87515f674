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

#include "fairkm/random_source.h"

#include <unordered_map>

namespace fairkm {

namespace {

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  return SplitMix(SplitMix(a) ^ (b * 0xd1b54a32d192ed03ULL));
}

RandomSource::RandomSource(std::uint64_t seed)
    : seed_(seed), engine_(SplitMix(seed)) {}

RandomSource RandomSource::Split(std::uint64_t stream) const {
  return RandomSource(MixSeed(seed_, stream + 1));
}

double RandomSource::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::UniformIndex(std::uint64_t bound) {
  // Lemire-style rejection keeps the draw unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = engine_();
    const unsigned __int128 product =
        static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(product) >= threshold) {
      return static_cast<std::uint64_t>(product >> 64);
    }
  }
}

std::vector<std::size_t> RandomSource::SampleWithoutReplacement(
    std::size_t population, std::size_t count) {
  // Sparse Fisher-Yates: only touched slots are materialized.
  std::unordered_map<std::size_t, std::size_t> swapped;
  auto slot = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + UniformIndex(population - i);
    const std::size_t picked = slot(j);
    swapped[j] = slot(i);
    out.push_back(picked);
  }
  return out;
}

}  // namespace fairkm
