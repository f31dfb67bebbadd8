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

// Greedy DPP MAP inference.
//
// greedy_feature_space is the production solver: it runs the greedy Cholesky
// recursion on the d-dimensional rows of phi, keeping an orthonormal basis of
// the selected directions, for O(K*T*d) time and O(T*d) memory.
// greedy_kernel_space runs the classic sample-space recursion on a dense
// kernel and must pick the same sequence; it exists as the equivalence oracle.

#ifndef LDDR_SELECT_HPP
#define LDDR_SELECT_HPP

#include "lddr/types.hpp"

#include <vector>

namespace lddr {

// Greedy stops once the best remaining residual gain is at or below this.
inline constexpr double kRankEpsilon = 1e-10;

SelectionTrace greedy_feature_space(const ConditionedFeatures& features, Index budget,
                                    double rank_epsilon = kRankEpsilon);

SelectionTrace greedy_kernel_space(const Matrix& kernel, Index budget,
                                   double rank_epsilon = kRankEpsilon);

struct ExhaustiveResult {
  std::vector<Index> subset;
  double logdet;
};

inline constexpr double kExhaustiveCap = 1e6;

// Exact argmax of det(L_S) over all size-k subsets (jittered log-det).
// Ties go to the lexicographically smallest subset.
ExhaustiveResult exhaustive_map(const Matrix& kernel, Index k, double jitter = 1e-8);

// Contiguous partition of [0, frame_count) into `chunks` spans, larger spans
// first. Returns the span start offsets plus a final end sentinel.
std::vector<Index> chunk_bounds(Index frame_count, Index chunks);

// Runs greedy_feature_space per chunk and concatenates in temporal order.
// The combined trace carries no basis since per-chunk bases are unrelated.
SelectionTrace chunked_select(const ConditionedFeatures& features, Index chunks, Index per_chunk,
                              double rank_epsilon = kRankEpsilon);

// log det(L_S + jitter*I) through Cholesky.
double subset_logdet(const Matrix& kernel, const std::vector<Index>& subset, double jitter = 1e-8);

}  // namespace lddr

#endif  // LDDR_SELECT_HPP
