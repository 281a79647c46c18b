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

#ifndef STREAMDP_TESTS_TEST_STATS_H_
#define STREAMDP_TESTS_TEST_STATS_H_

#include <cmath>
#include <cstddef>
#include <vector>

namespace streamdp::testing {

// Two-pass sample moments.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  size_t n = 0;
  double StdErr() const { return std::sqrt(variance / static_cast<double>(n)); }
};

inline Moments ComputeMoments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
  m.variance /= static_cast<double>(m.n - 1);
  return m;
}

}  // namespace streamdp::testing

#endif  // STREAMDP_TESTS_TEST_STATS_H_
