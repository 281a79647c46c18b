// Copyright 2026 The streamdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STREAMDP_RANDOM_H_
#define STREAMDP_RANDOM_H_

#include <cstdint>
#include <limits>

namespace streamdp {

// Counter-based generator keyed by (seed, stream id). Draw k of a stream is a
// pure function of (seed, stream id, k), so independent sub-streams never
// share draws and any stream can be reproduced from its key alone.
class RandomSource {
 public:
  using result_type = uint64_t;

  RandomSource(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }
  uint64_t counter() const { return counter_; }

  // Derives a child stream whose key depends on this stream's key and
  // `child_id` only (not on how many draws have been consumed).
  RandomSource Split(uint64_t child_id) const;

  uint64_t NextU64();
  uint64_t operator()() { return NextU64(); }
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() {
    return std::numeric_limits<uint64_t>::max();
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  double Uniform(double lo, double hi);
  // Uniform integer on [0, bound); bound > 0.
  uint64_t UniformInt(uint64_t bound);
  bool Bernoulli(double p);

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace streamdp

#endif  // STREAMDP_RANDOM_H_
