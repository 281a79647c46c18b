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

#ifndef STREAMDP_HIERARCHY_H_
#define STREAMDP_HIERARCHY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "streamdp/random.h"
#include "streamdp/threshold.h"

namespace streamdp {

// Shape and budget split of the per-chunk hierarchy. Levels 1..h lie below a
// root spanning the whole chunk, which is never noised, so each chunk carries
// a forest of b subtrees of height h. The bottom `smoothed` levels are
// delegated to the smoother; noise is added on the remaining
// `active_levels` = height - smoothed levels, each receiving epsilon / active.
struct HierarchyPlan {
  int fanout = 16;
  uint64_t chunk_size = 0;  // r readings per chunk
  int height = 0;           // ceil(log_b r)
  int smoothed = 0;         // s
  int active_levels = 0;
  double epsilon = 0.0;
  double level_epsilon = 0.0;
  uint64_t group_size = 1;        // b^s readings per active leaf
  uint64_t active_leaves = 1;     // leaves per subtree, b^(h-s-1)
  uint64_t groups_per_chunk = 1;  // ceil(r / b^s)
  uint64_t trees_per_chunk = 1;   // ceil(groups_per_chunk / active_leaves)

  double NodeNoiseScale(double theta) const { return theta / level_epsilon; }
};

// Smallest h with b^h >= r, computed in integers.
int CeilLog(uint64_t r, int b);

HierarchyPlan PlanHierarchy(int fanout, uint64_t range_limit, double epsilon,
                            int smoothed);
HierarchyPlan PlanHierarchy(const StreamConfig& config, int smoothed);

// Complete b-ary tree of per-node values. Level 0 holds the leaves (height 1)
// and level levels()-1 the single root; node i on level l has parent i / b on
// level l+1 and children [i*b, i*b+b) on level l-1.
class NoiseTree {
 public:
  NoiseTree(int fanout, int levels);

  int fanout() const { return fanout_; }
  int levels() const { return static_cast<int>(levels_.size()); }
  bool consistent() const { return consistent_; }

  std::span<double> Level(int level) { return levels_[level]; }
  std::span<const double> Level(int level) const { return levels_[level]; }
  std::span<const double> Leaves() const { return levels_.front(); }
  double Root() const { return levels_.back().front(); }

  // Largest |N(x) - sum of children| / (1 + |N(x)|) over internal nodes.
  double MaxConsistencyViolation() const;

  // Breadth-first (root first) flattening and its inverse.
  std::vector<double> ToBreadthFirst() const;
  static NoiseTree FromBreadthFirst(int fanout, int levels,
                                    std::span<const double> values);

 private:
  friend NoiseTree MakeConsistent(NoiseTree tree);

  int fanout_;
  std::vector<std::vector<double>> levels_;
  bool consistent_ = false;
};

// Independent Laplace(theta / level_epsilon) noise on every active node.
NoiseTree BuildNoiseTree(const HierarchyPlan& plan, double theta,
                         RandomSource& rng);

// Weighted bottom-up then top-down averaging; afterwards every internal node
// equals the sum of its children.
NoiseTree MakeConsistent(NoiseTree tree);

// The same two passes applied to a full noisy hierarchy held breadth-first
// (root first). Kept separate from MakeConsistent so the two can be checked
// against each other.
std::vector<double> OfflineConsistencyReference(std::span<const double> noisy,
                                                int fanout, int levels);

// Sum of the canonical decomposition of leaf range [lo, hi) over a tree:
// whole blocks of b siblings are replaced by their parent, level by level.
double DecomposedRangeSum(const NoiseTree& tree, uint64_t lo, uint64_t hi);

// Noise forest of one chunk: trees_per_chunk subtrees, subtree t drawn from
// rng.Split(t), each made consistent when requested.
std::vector<NoiseTree> BuildChunkNoise(const HierarchyPlan& plan, double theta,
                                       const RandomSource& rng, bool consistent);

// One chunk of the on-line perturber. Holds the consistent noise of its
// active leaves and emits one noisy aggregate per completed group.
class HierarchyChunk {
 public:
  HierarchyChunk(const HierarchyPlan& plan, double theta,
                 std::vector<NoiseTree> trees);

  // `v` must already be truncated to [0, theta].
  std::optional<double> Ingest(double v);
  // Emits the pending partial group, if any.
  std::optional<double> Close();

  bool full() const { return consumed_ == plan_.chunk_size; }
  uint64_t consumed() const { return consumed_; }
  uint64_t group_index() const { return group_; }
  const std::vector<NoiseTree>& trees() const { return trees_; }
  // Noise on active leaf (group) g of this chunk.
  double LeafNoise(uint64_t g) const;

 private:
  double Emit();

  HierarchyPlan plan_;
  double theta_;
  std::vector<NoiseTree> trees_;
  uint64_t consumed_ = 0;
  uint64_t group_ = 0;
  uint64_t in_group_ = 0;
  double group_sum_ = 0.0;
};

struct Emission {
  uint64_t chunk;
  uint64_t group;  // group index within the chunk
  double value;
};

// Chains chunks over an unbounded stream. Chunk k draws its noise from
// rng.Split(k), so disjoint chunks never share draws.
class StreamPerturber {
 public:
  StreamPerturber(const HierarchyPlan& plan, double theta, RandomSource rng,
                  bool consistent = true);

  std::optional<Emission> Ingest(double v);
  std::optional<Emission> Flush();

  const HierarchyPlan& plan() const { return plan_; }
  uint64_t chunk_index() const { return chunk_index_; }

 private:
  void OpenChunk();

  HierarchyPlan plan_;
  double theta_;
  RandomSource rng_;
  bool consistent_;
  uint64_t chunk_index_ = 0;
  std::optional<HierarchyChunk> chunk_;
};

// Full noisy hierarchies over a finite (already truncated) stream, one per
// chunk, for answering range queries from internal nodes. Uses the same
// per-chunk noise as StreamPerturber with the same rng and plan. Only plans
// with s = 0 are supported.
class HierarchyRelease {
 public:
  HierarchyRelease(const HierarchyPlan& plan, double theta,
                   std::span<const double> truncated, RandomSource rng,
                   bool consistent);

  // Noisy estimate of the sum over readings [i, j] (0-based, inclusive).
  double RangeSum(uint64_t i, uint64_t j) const;
  // Per-reading view: the noisy active leaves (s = 0 only).
  std::vector<double> LeafStream() const;

 private:
  HierarchyPlan plan_;
  uint64_t length_;
  std::vector<std::vector<NoiseTree>> noisy_;  // T + N per chunk and subtree
};

}  // namespace streamdp

#endif  // STREAMDP_HIERARCHY_H_
