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

#include "streamdp/random.h"

namespace streamdp {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t DeriveKey(uint64_t seed, uint64_t stream_id) {
  return Mix64(Mix64(seed + kGolden) ^ Mix64(~stream_id * 0xd1342543de82ef95ULL));
}

}  // namespace

RandomSource::RandomSource(uint64_t seed, uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(DeriveKey(seed, stream_id)) {}

RandomSource RandomSource::Split(uint64_t child_id) const {
  // The child is keyed off this stream's key so nested splits stay distinct.
  return RandomSource(key_, child_id);
}

uint64_t RandomSource::NextU64() {
  // Two rounds of mixing over (key + counter * golden) decorrelate
  // streams whose keys happen to differ by a multiple of the increment.
  const uint64_t x = key_ + (++counter_) * kGolden;
  return Mix64(Mix64(x) ^ key_);
}

double RandomSource::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RandomSource::UniformOpen() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

uint64_t RandomSource::UniformInt(uint64_t bound) {
  // Lemire's nearly-divisionless rejection method.
  unsigned __int128 m = static_cast<unsigned __int128>(NextU64()) * bound;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(NextU64()) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

bool RandomSource::Bernoulli(double p) { return Uniform() < p; }

}  // namespace streamdp
