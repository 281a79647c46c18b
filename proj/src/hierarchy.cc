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

#include "streamdp/hierarchy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "streamdp/errors.h"
#include "streamdp/mechanisms.h"

namespace streamdp {
namespace {

uint64_t IntPow(uint64_t base, int exp) {
  uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

double Pow(double base, int exp) { return std::pow(base, exp); }

}  // namespace

int CeilLog(uint64_t r, int b) {
  if (b < 2) throw InvalidParameterError("fan-out must be >= 2");
  if (r < 1) throw InvalidParameterError("range limit must be >= 1");
  int h = 0;
  uint64_t span = 1;
  while (span < r) {
    span *= static_cast<uint64_t>(b);
    ++h;
  }
  return h;
}

HierarchyPlan PlanHierarchy(int fanout, uint64_t range_limit, double epsilon,
                            int smoothed) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("epsilon must be > 0");
  if (range_limit < static_cast<uint64_t>(fanout)) {
    throw InvalidParameterError("range limit r must be >= fan-out b");
  }
  HierarchyPlan plan;
  plan.fanout = fanout;
  plan.chunk_size = range_limit;
  plan.height = CeilLog(range_limit, fanout);
  if (smoothed < 0 || smoothed >= plan.height) {
    throw InvalidParameterError("smoothed levels s must satisfy 0 <= s < h");
  }
  plan.smoothed = smoothed;
  plan.active_levels = plan.height - smoothed;
  plan.epsilon = epsilon;
  plan.level_epsilon = epsilon / plan.active_levels;
  plan.group_size = IntPow(fanout, smoothed);
  plan.active_leaves = IntPow(fanout, plan.active_levels - 1);
  plan.groups_per_chunk = (range_limit + plan.group_size - 1) / plan.group_size;
  plan.trees_per_chunk =
      (plan.groups_per_chunk + plan.active_leaves - 1) / plan.active_leaves;
  return plan;
}

HierarchyPlan PlanHierarchy(const StreamConfig& config, int smoothed) {
  return PlanHierarchy(config.fanout, config.range_limit, config.epsilon,
                       smoothed);
}

NoiseTree::NoiseTree(int fanout, int levels) : fanout_(fanout) {
  if (fanout < 2 || levels < 1) {
    throw InvalidParameterError("noise tree needs b >= 2 and >= 1 level");
  }
  levels_.resize(levels);
  for (int l = 0; l < levels; ++l) {
    levels_[l].assign(IntPow(fanout, levels - 1 - l), 0.0);
  }
}

double NoiseTree::MaxConsistencyViolation() const {
  double worst = 0.0;
  const size_t b = fanout_;
  for (size_t l = 1; l < levels_.size(); ++l) {
    const auto& parents = levels_[l];
    const auto& kids = levels_[l - 1];
    for (size_t i = 0; i < parents.size(); ++i) {
      const double sum =
          std::accumulate(kids.begin() + i * b, kids.begin() + (i + 1) * b, 0.0);
      worst = std::max(worst,
                       std::fabs(parents[i] - sum) / (1.0 + std::fabs(parents[i])));
    }
  }
  return worst;
}

std::vector<double> NoiseTree::ToBreadthFirst() const {
  std::vector<double> out;
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
    out.insert(out.end(), it->begin(), it->end());
  }
  return out;
}

NoiseTree NoiseTree::FromBreadthFirst(int fanout, int levels,
                                      std::span<const double> values) {
  NoiseTree tree(fanout, levels);
  size_t pos = 0;
  for (int l = levels - 1; l >= 0; --l) {
    auto& level = tree.levels_[l];
    if (pos + level.size() > values.size()) {
      throw InvalidParameterError("breadth-first array too short for tree");
    }
    std::copy_n(values.begin() + pos, level.size(), level.begin());
    pos += level.size();
  }
  if (pos != values.size()) {
    throw InvalidParameterError("breadth-first array too long for tree");
  }
  return tree;
}

NoiseTree BuildNoiseTree(const HierarchyPlan& plan, double theta,
                         RandomSource& rng) {
  if (!(theta > 0.0)) {
    throw InvalidParameterError("threshold must be > 0 to build noise");
  }
  NoiseTree tree(plan.fanout, plan.active_levels);
  const LaplaceParams params{plan.NodeNoiseScale(theta)};
  for (int l = 0; l < tree.levels(); ++l) {
    for (double& n : tree.Level(l)) n = LaplaceSample(params, rng);
  }
  return tree;
}

NoiseTree MakeConsistent(NoiseTree tree) {
  const size_t b = tree.fanout_;
  const double bd = static_cast<double>(b);
  auto& levels = tree.levels_;
  const int top = static_cast<int>(levels.size()) - 1;
  // Bottom-up: heights 2..h, children already updated.
  for (int l = 1; l <= top; ++l) {
    const int height = l + 1;
    const double full = Pow(bd, height);
    const double below = Pow(bd, height - 1);
    const double w_self = (full - below) / (full - 1.0);
    const double w_kids = (below - 1.0) / (full - 1.0);
    const auto& kids = levels[l - 1];
    for (size_t i = 0; i < levels[l].size(); ++i) {
      const double sum =
          std::accumulate(kids.begin() + i * b, kids.begin() + (i + 1) * b, 0.0);
      levels[l][i] = w_self * levels[l][i] + w_kids * sum;
    }
  }
  // Top-down: each child absorbs 1/b of its parent's residual. Sibling sums
  // use the bottom-up values.
  for (int l = top - 1; l >= 0; --l) {
    auto& kids = levels[l];
    const auto& parents = levels[l + 1];
    for (size_t i = 0; i < parents.size(); ++i) {
      const double sum =
          std::accumulate(kids.begin() + i * b, kids.begin() + (i + 1) * b, 0.0);
      const double share = (parents[i] - sum) / bd;
      for (size_t k = i * b; k < (i + 1) * b; ++k) kids[k] += share;
    }
  }
  tree.consistent_ = true;
  return tree;
}

std::vector<double> OfflineConsistencyReference(std::span<const double> noisy,
                                                int fanout, int levels) {
  const size_t b = fanout;
  size_t total = 0;
  for (int l = 0; l < levels; ++l) total += IntPow(b, l);
  if (noisy.size() != total) {
    throw InvalidParameterError("offline consistency: wrong node count");
  }
  // Node k (root = 0) has children b*k+1 .. b*k+b; depth d has height
  // levels - d.
  std::vector<double> z(noisy.begin(), noisy.end());
  std::vector<size_t> depth_start(levels + 1, 0);
  for (int d = 1; d <= levels; ++d) depth_start[d] = depth_start[d - 1] + IntPow(b, d - 1);
  const double bd = static_cast<double>(b);

  for (int d = levels - 2; d >= 0; --d) {
    const int height = levels - d;
    const double bl = std::pow(bd, height);
    const double bl1 = std::pow(bd, height - 1);
    for (size_t k = depth_start[d]; k < depth_start[d + 1]; ++k) {
      double kids = 0.0;
      for (size_t c = 1; c <= b; ++c) kids += z[b * k + c];
      z[k] = (bl - bl1) / (bl - 1.0) * z[k] + (bl1 - 1.0) / (bl - 1.0) * kids;
    }
  }
  std::vector<double> out = z;
  for (int d = 1; d < levels; ++d) {
    for (size_t k = depth_start[d]; k < depth_start[d + 1]; ++k) {
      const size_t parent = (k - 1) / b;
      double siblings = 0.0;
      for (size_t c = 1; c <= b; ++c) {
        const size_t s = b * parent + c;
        if (s != k) siblings += z[s];
      }
      out[k] = (bd - 1.0) / bd * z[k] + (out[parent] - siblings) / bd;
    }
  }
  return out;
}

double DecomposedRangeSum(const NoiseTree& tree, uint64_t lo, uint64_t hi) {
  const uint64_t b = tree.fanout();
  if (hi > tree.Leaves().size() || lo > hi) {
    throw InvalidParameterError("range outside tree");
  }
  double sum = 0.0;
  const auto add = [&](int level, uint64_t from, uint64_t to) {
    auto values = tree.Level(level);
    for (uint64_t k = from; k < to; ++k) sum += values[k];
  };
  for (int level = 0; level < tree.levels() && lo < hi; ++level) {
    if (level == tree.levels() - 1) {
      add(level, lo, hi);
      break;
    }
    const uint64_t lo_up = (lo + b - 1) / b * b;
    const uint64_t hi_down = hi / b * b;
    if (lo_up >= hi_down) {
      // No complete sibling block inside the range.
      add(level, lo, hi);
      break;
    }
    add(level, lo, lo_up);
    add(level, hi_down, hi);
    lo = lo_up / b;
    hi = hi_down / b;
  }
  return sum;
}

std::vector<NoiseTree> BuildChunkNoise(const HierarchyPlan& plan, double theta,
                                       const RandomSource& rng, bool consistent) {
  std::vector<NoiseTree> trees;
  trees.reserve(plan.trees_per_chunk);
  for (uint64_t t = 0; t < plan.trees_per_chunk; ++t) {
    RandomSource tree_rng = rng.Split(t);
    NoiseTree tree = BuildNoiseTree(plan, theta, tree_rng);
    trees.push_back(consistent ? MakeConsistent(std::move(tree)) : std::move(tree));
  }
  return trees;
}

HierarchyChunk::HierarchyChunk(const HierarchyPlan& plan, double theta,
                               std::vector<NoiseTree> trees)
    : plan_(plan), theta_(theta), trees_(std::move(trees)) {
  if (trees_.size() != plan.trees_per_chunk) {
    throw InvalidParameterError("noise forest does not match hierarchy plan");
  }
  for (const NoiseTree& tree : trees_) {
    if (tree.levels() != plan.active_levels || tree.fanout() != plan.fanout) {
      throw InvalidParameterError("noise tree does not match hierarchy plan");
    }
  }
}

double HierarchyChunk::LeafNoise(uint64_t g) const {
  return trees_[g / plan_.active_leaves].Leaves()[g % plan_.active_leaves];
}

double HierarchyChunk::Emit() {
  const double value = group_sum_ + LeafNoise(group_);
  ++group_;
  in_group_ = 0;
  group_sum_ = 0.0;
  return value;
}

std::optional<double> HierarchyChunk::Ingest(double v) {
  if (full()) throw DataError("ingest into a closed chunk");
  if (!(v >= 0.0 && v <= theta_)) {
    throw DataError("perturber input outside [0, theta]; truncate first");
  }
  group_sum_ += v;
  ++in_group_;
  ++consumed_;
  if (in_group_ == plan_.group_size) return Emit();
  return std::nullopt;
}

std::optional<double> HierarchyChunk::Close() {
  if (in_group_ == 0) return std::nullopt;
  return Emit();
}

StreamPerturber::StreamPerturber(const HierarchyPlan& plan, double theta,
                                 RandomSource rng, bool consistent)
    : plan_(plan), theta_(theta), rng_(rng), consistent_(consistent) {
  OpenChunk();
}

void StreamPerturber::OpenChunk() {
  chunk_.emplace(plan_, theta_,
                 BuildChunkNoise(plan_, theta_, rng_.Split(chunk_index_),
                                 consistent_));
}

std::optional<Emission> StreamPerturber::Ingest(double v) {
  const uint64_t group = chunk_->group_index();
  std::optional<double> out = chunk_->Ingest(v);
  if (chunk_->full()) {
    if (!out) out = chunk_->Close();
    const uint64_t closed = chunk_index_++;
    OpenChunk();
    if (out) return Emission{closed, group, *out};
    return std::nullopt;
  }
  if (out) return Emission{chunk_index_, group, *out};
  return std::nullopt;
}

std::optional<Emission> StreamPerturber::Flush() {
  const uint64_t group = chunk_->group_index();
  if (auto out = chunk_->Close()) return Emission{chunk_index_, group, *out};
  return std::nullopt;
}

HierarchyRelease::HierarchyRelease(const HierarchyPlan& plan, double theta,
                                   std::span<const double> truncated,
                                   RandomSource rng, bool consistent)
    : plan_(plan), length_(truncated.size()) {
  if (plan.smoothed != 0) {
    throw InvalidParameterError("hierarchy release requires s = 0");
  }
  const uint64_t chunks = (length_ + plan.chunk_size - 1) / plan.chunk_size;
  const uint64_t span = plan.active_leaves;  // readings per subtree
  noisy_.reserve(chunks);
  for (uint64_t c = 0; c < chunks; ++c) {
    std::vector<NoiseTree> forest =
        BuildChunkNoise(plan, theta, rng.Split(c), consistent);
    const uint64_t begin = c * plan.chunk_size;
    const uint64_t end = std::min(length_, begin + plan.chunk_size);
    for (uint64_t t = 0; t < forest.size(); ++t) {
      // Add the true aggregates level by level.
      NoiseTree& tree = forest[t];
      std::vector<double> sums(span, 0.0);
      for (uint64_t k = 0; k < span; ++k) {
        const uint64_t i = begin + t * span + k;
        if (i < end) sums[k] = truncated[i];
      }
      for (int l = 0; l < tree.levels(); ++l) {
        auto level = tree.Level(l);
        for (size_t k = 0; k < level.size(); ++k) level[k] += sums[k];
        if (l + 1 == tree.levels()) break;
        std::vector<double> up(level.size() / plan.fanout, 0.0);
        for (size_t k = 0; k < sums.size(); ++k) up[k / plan.fanout] += sums[k];
        sums = std::move(up);
      }
    }
    noisy_.push_back(std::move(forest));
  }
}

double HierarchyRelease::RangeSum(uint64_t i, uint64_t j) const {
  if (i > j || j >= length_) throw InvalidParameterError("invalid range");
  double sum = 0.0;
  const uint64_t r = plan_.chunk_size;
  const uint64_t span = plan_.active_leaves;
  for (uint64_t c = i / r; c <= j / r; ++c) {
    const uint64_t lo = std::max(i, c * r) - c * r;
    const uint64_t hi = std::min(j + 1, (c + 1) * r) - c * r;  // exclusive
    for (uint64_t t = lo / span; t * span < hi; ++t) {
      const uint64_t a = std::max(lo, t * span) - t * span;
      const uint64_t b = std::min(hi, (t + 1) * span) - t * span;
      sum += DecomposedRangeSum(noisy_[c][t], a, b);
    }
  }
  return sum;
}

std::vector<double> HierarchyRelease::LeafStream() const {
  std::vector<double> out;
  out.reserve(length_);
  for (const auto& forest : noisy_) {
    uint64_t take = std::min<uint64_t>(plan_.chunk_size, length_ - out.size());
    for (const NoiseTree& tree : forest) {
      const uint64_t k = std::min<uint64_t>(take, tree.Leaves().size());
      out.insert(out.end(), tree.Leaves().begin(), tree.Leaves().begin() + k);
      take -= k;
    }
  }
  return out;
}

}  // namespace streamdp
