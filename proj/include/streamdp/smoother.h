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

#ifndef STREAMDP_SMOOTHER_H_
#define STREAMDP_SMOOTHER_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace streamdp {

// Modelled squared error of delegating the bottom s levels to the smoother:
// (b-1)(log_b r - s)^3 * 2 theta^2 / eps^2 + (b^s / 2) * theta^2 / 4.
double SmoothingErrorModel(int s, double theta, double epsilon, uint64_t r,
                           int b);

// Exhaustive argmin of SmoothingErrorModel over s in [0, h-1]; ties go to
// the smaller s.
int OptimizeSmoothedLevels(double theta, double epsilon, uint64_t r, int b);

enum class SmootherKind { kRecent, kMean, kMedian, kMovingAverage, kExponential };

std::string ToString(SmootherKind kind);
SmootherKind SmootherKindFromString(const std::string& name);

struct SmootherOptions {
  SmootherKind kind = SmootherKind::kRecent;
  int window = 4;      // moving average
  double alpha = 0.5;  // exponential
};

// Turns group aggregates u_1, u_2, ... (each a noisy sum of b^s readings)
// into one estimate per reading. Readings of group g are predicted from
// u_0 .. u_{g-1}, where u_0 = b^s * theta / 2 is the prior.
class Smoother {
 public:
  Smoother(const SmootherOptions& options, uint64_t group_size, double theta);

  // Called once per reading. `new_group` carries the aggregate of the group
  // completed just before this reading, if any.
  double Next(std::optional<double> new_group);

  uint64_t groups_received() const { return history_.size(); }
  double prior() const { return prior_; }

 private:
  void Receive(double u);
  double Current() const;
  double RunningMedian() const;

  SmootherOptions options_;
  double group_size_;
  double prior_;
  std::vector<double> history_;  // u_1 .. u_t
  double running_sum_ = 0.0;     // u_0 + ... + u_t
  double exponential_;           // last exponential estimate
  double current_;               // estimate emitted until the next group
  // Two-heap running median of u_1 .. u_t.
  std::priority_queue<double> lower_;
  std::priority_queue<double, std::vector<double>, std::greater<double>> upper_;
};

}  // namespace streamdp

#endif  // STREAMDP_SMOOTHER_H_
