// Copyright 2026 The LDDR Authors.
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

// Budget-aware retention and per-frame token allocation.
//
// Candidates are ranked by density-aware GD score. For a prefix of size k the
// scores are renormalized to shares alpha and each frame is granted
// clamp(C_total * alpha, w_min, w_max) tokens, floored. The plan keeps the
// largest k whose grants fit C_total. Feasibility is not monotone in k once
// clamping kicks in, so k* is found by an exact scan rather than bisection.

#ifndef LDDR_ALLOC_HPP
#define LDDR_ALLOC_HPP

#include "lddr/config.hpp"
#include "lddr/types.hpp"

#include <span>
#include <vector>

namespace lddr {

// Absorbs round-off in share products before flooring to whole tokens.
inline constexpr double kFloorSlack = 1e-9;

struct PrefixAllocation {
  std::vector<int> tokens;
  long long total = 0;
  bool feasible = false;
};

// Grants for the first `prefix_k` entries of `sorted_scores` (already in
// ranking order).
PrefixAllocation allocate_sorted_prefix(std::span<const double> sorted_scores, long long budget,
                                        TokenBounds bounds, Index prefix_k);

// Ranks `scores` and allocates over its top `prefix_k`.
PrefixAllocation prefix_allocation(const ImportanceTable& scores, long long budget,
                                   TokenBounds bounds, Index prefix_k);

AllocationPlan largest_feasible_prefix(const ImportanceTable& scores, long long budget,
                                       TokenBounds bounds, FrameGeometry geometry = {});

Resolution tokens_to_resolution(int tokens, int orig_height_px, int orig_width_px);

struct PipelineResult {
  SelectionTrace trace;
  ImportanceTable scores;
  AllocationPlan plan;
};

// Candidate selection, GD scoring and allocation end to end.
PipelineResult build_pipeline(const EmbeddingSet& embeddings, const RunConfig& config);

}  // namespace lddr

#endif  // LDDR_ALLOC_HPP
