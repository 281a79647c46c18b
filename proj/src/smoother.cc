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

#include "streamdp/smoother.h"

#include <cmath>

#include "streamdp/errors.h"
#include "streamdp/hierarchy.h"

namespace streamdp {

double SmoothingErrorModel(int s, double theta, double epsilon, uint64_t r,
                           int b) {
  const double levels = std::log(static_cast<double>(r)) / std::log(b) - s;
  const double noise =
      (b - 1.0) * levels * levels * levels * 2.0 * theta * theta /
      (epsilon * epsilon);
  const double bias = std::pow(static_cast<double>(b), s) / 2.0 * theta * theta / 4.0;
  return noise + bias;
}

int OptimizeSmoothedLevels(double theta, double epsilon, uint64_t r, int b) {
  if (!(theta > 0.0) || !(epsilon > 0.0)) {
    throw InvalidParameterError("smoother levels need theta, epsilon > 0");
  }
  const int h = CeilLog(r, b);
  int best = 0;
  double best_err = SmoothingErrorModel(0, theta, epsilon, r, b);
  for (int s = 1; s < h; ++s) {
    const double err = SmoothingErrorModel(s, theta, epsilon, r, b);
    if (err < best_err) {
      best_err = err;
      best = s;
    }
  }
  return best;
}

std::string ToString(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::kRecent: return "recent";
    case SmootherKind::kMean: return "mean";
    case SmootherKind::kMedian: return "median";
    case SmootherKind::kMovingAverage: return "moving_average";
    case SmootherKind::kExponential: return "exponential";
  }
  return "recent";
}

SmootherKind SmootherKindFromString(const std::string& name) {
  for (auto k : {SmootherKind::kRecent, SmootherKind::kMean,
                 SmootherKind::kMedian, SmootherKind::kMovingAverage,
                 SmootherKind::kExponential}) {
    if (ToString(k) == name) return k;
  }
  throw ConfigError("unknown smoother kind: " + name);
}

Smoother::Smoother(const SmootherOptions& options, uint64_t group_size,
                   double theta)
    : options_(options),
      group_size_(static_cast<double>(group_size)),
      prior_(static_cast<double>(group_size) * theta / 2.0),
      running_sum_(prior_),
      exponential_(prior_ / static_cast<double>(group_size)),
      current_(exponential_) {
  if (group_size == 0) throw InvalidParameterError("group size must be >= 1");
  if (options.window < 1) throw InvalidParameterError("window must be >= 1");
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) {
    throw InvalidParameterError("alpha must lie in [0, 1]");
  }
}

void Smoother::Receive(double u) {
  history_.push_back(u);
  running_sum_ += u;
  exponential_ = options_.alpha * u / group_size_ +
                 (1.0 - options_.alpha) * exponential_;
  if (lower_.empty() || u <= lower_.top()) {
    lower_.push(u);
  } else {
    upper_.push(u);
  }
  if (lower_.size() > upper_.size() + 1) {
    upper_.push(lower_.top());
    lower_.pop();
  } else if (upper_.size() > lower_.size()) {
    lower_.push(upper_.top());
    upper_.pop();
  }
}

double Smoother::RunningMedian() const {
  if (lower_.size() > upper_.size()) return lower_.top();
  return 0.5 * (lower_.top() + upper_.top());
}

double Smoother::Current() const {
  const size_t t = history_.size();
  if (t == 0) return prior_ / group_size_;
  switch (options_.kind) {
    case SmootherKind::kRecent:
      return history_.back() / group_size_;
    case SmootherKind::kMean:
      // Sums t + 1 terms (prior included) over a divisor of t.
      return running_sum_ / (group_size_ * static_cast<double>(t));
    case SmootherKind::kMedian:
      return RunningMedian() / group_size_;
    case SmootherKind::kMovingAverage: {
      const size_t w = static_cast<size_t>(options_.window);
      if (t + 1 < w) {
        return running_sum_ / (group_size_ * static_cast<double>(t + 1));
      }
      double sum = 0.0;
      // u_{t+1-w} .. u_t; index 0 of the window may be the prior.
      for (size_t j = t + 1 - w; j <= t; ++j) {
        sum += j == 0 ? prior_ : history_[j - 1];
      }
      return sum / (group_size_ * static_cast<double>(w));
    }
    case SmootherKind::kExponential:
      return exponential_;
  }
  return 0.0;
}

double Smoother::Next(std::optional<double> new_group) {
  if (new_group) {
    Receive(*new_group);
    current_ = Current();
  }
  return current_;
}

}  // namespace streamdp
