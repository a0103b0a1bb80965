// Copyright 2026 The Residual Copilot Authors
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

#ifndef SA_COMMON_RNG_H_
#define SA_COMMON_RNG_H_

#include <cstdint>
#include <limits>
#include <vector>

namespace sa {

// Counter-based generator: draw k of stream `seed` is splitmix64(seed, k).
// Every draw consumes exactly one counter value, so the number of draws a
// component makes per step fully determines replay.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed = 0) : seed_(seed) {}

  uint64_t NextU64();

  // Uniform in [0, 1). One draw.
  double Uniform();
  // Uniform in [lo, hi). One draw.
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Standard normal via Box-Muller. Two draws, no caching.
  double Normal();
  // Uniform integer in [0, n). One draw.
  uint64_t Below(uint64_t n);
  bool Bernoulli(double p) { return Uniform() < p; }

  // Derives an independent stream, e.g. one per episode or worker.
  Rng Fork(uint64_t stream) const;

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }

  // UniformRandomBitGenerator interface.
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() {
    return std::numeric_limits<uint64_t>::max();
  }
  uint64_t operator()() { return NextU64(); }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

// splitmix64 finalizer.
uint64_t Mix64(uint64_t x);

// Seed for sub-stream `index` of `base`; stable across platforms.
uint64_t DeriveSeed(uint64_t base, uint64_t index);

// Fisher-Yates permutation of [0, n) drawing from `rng`.
std::vector<int> Permutation(int n, Rng& rng);

}  // namespace sa

#endif  // SA_COMMON_RNG_H_
