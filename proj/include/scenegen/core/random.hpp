// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace scenegen {

// splitmix64 finalizer; used to derive independent child streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Deterministic random stream. Normal variates use Box-Muller so the byte
// stream does not depend on the standard library's distribution internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : seed_(seed), gen_(mix_seed(seed, 0x9E3779B97F4A7C15ull)) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform() {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal();

  // Independent child stream; forking is a pure function of (seed, id).
  RandomStream fork(std::uint64_t stream_id) const {
    return RandomStream(mix_seed(seed_, stream_id));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace scenegen
