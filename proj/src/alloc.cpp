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

#include "lddr/alloc.hpp"

#include "lddr/gd.hpp"
#include "lddr/kernel.hpp"
#include "lddr/select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lddr {

const char* to_string(Mode mode) { return mode == Mode::kFixed ? "fixed" : "dynamic"; }

std::optional<Mode> parse_mode(const std::string& text) {
  if (text == "fixed") return Mode::kFixed;
  if (text == "dynamic") return Mode::kDynamic;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (frame_budget < 1) throw Error(ErrorCode::kInvalidBudget, "frame budget F must be >= 1");
  if (bounds.w_min <= 0 || bounds.w_min > bounds.w_max) {
    throw Error(ErrorCode::kInvalidBounds, "token bounds must satisfy 0 < w_min <= w_max");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be a finite nonnegative value");
  }
  if (!(pool_multiplier >= 1.0) || !std::isfinite(pool_multiplier)) {
    throw Error(ErrorCode::kInvalidArgument, "pool multiplier must be >= 1");
  }
  if (chunks < 1) throw Error(ErrorCode::kInvalidPartition, "chunk count must be >= 1");
  if (!(rank_epsilon >= 0.0) || !(gram_jitter >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon overrides must be nonnegative");
  }
  if (geometry.height_px <= 0 || geometry.width_px <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame geometry must be positive");
  }
}

long long RunConfig::token_budget() const {
  return static_cast<long long>(frame_budget) * bounds.w_max;
}

namespace {

void check_bounds(TokenBounds bounds) {
  if (bounds.w_min <= 0 || bounds.w_min > bounds.w_max) {
    throw Error(ErrorCode::kInvalidBounds, "token bounds must satisfy 0 < w_min <= w_max (got " +
                                               std::to_string(bounds.w_min) + ", " +
                                               std::to_string(bounds.w_max) + ")");
  }
}

std::vector<double> ranked_scores(const ImportanceTable& scores, const std::vector<Index>& order) {
  std::vector<double> out;
  out.reserve(order.size());
  for (Index pos : order) out.push_back(scores.entries()[pos].density_aware);
  return out;
}

}  // namespace

PrefixAllocation allocate_sorted_prefix(std::span<const double> sorted_scores, long long budget,
                                        TokenBounds bounds, Index prefix_k) {
  check_bounds(bounds);
  if (prefix_k < 1 || prefix_k > sorted_scores.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prefix size " + std::to_string(prefix_k) +
                                                 " outside [1, " +
                                                 std::to_string(sorted_scores.size()) + "]");
  }
  double sum = 0.0;
  for (Index i = 0; i < prefix_k; ++i) sum += sorted_scores[i];

  PrefixAllocation out;
  out.tokens.reserve(prefix_k);
  for (Index i = 0; i < prefix_k; ++i) {
    const double share = sum > 0.0 ? sorted_scores[i] / sum : 1.0 / static_cast<double>(prefix_k);
    const double raw = static_cast<double>(budget) * share;
    const double clamped = std::clamp(raw, static_cast<double>(bounds.w_min),
                                      static_cast<double>(bounds.w_max));
    const int tokens = std::max(bounds.w_min, static_cast<int>(std::floor(clamped + kFloorSlack)));
    out.tokens.push_back(tokens);
    out.total += tokens;
  }
  out.feasible = out.total <= budget;
  return out;
}

PrefixAllocation prefix_allocation(const ImportanceTable& scores, long long budget,
                                   TokenBounds bounds, Index prefix_k) {
  const std::vector<double> sorted = ranked_scores(scores, scores.ranking());
  return allocate_sorted_prefix(sorted, budget, bounds, prefix_k);
}

Resolution tokens_to_resolution(int tokens, int orig_height_px, int orig_width_px) {
  if (tokens < 1 || orig_height_px < 1 || orig_width_px < 1) {
    throw Error(ErrorCode::kInvalidArgument, "token count and frame size must be positive");
  }
  const double aspect = static_cast<double>(orig_height_px) / orig_width_px;
  int rows = std::max(1, static_cast<int>(std::lround(std::sqrt(tokens * aspect))));
  const int cols = std::max(1, tokens / rows);
  while (rows > 1 && static_cast<long long>(rows) * cols > tokens) --rows;
  return {rows * kPatchSize, cols * kPatchSize};
}

AllocationPlan largest_feasible_prefix(const ImportanceTable& scores, long long budget,
                                       TokenBounds bounds, FrameGeometry geometry) {
  check_bounds(bounds);
  if (scores.size() == 0) throw Error(ErrorCode::kEmptySet, "no candidates to allocate");
  if (budget < bounds.w_min) {
    throw Error(ErrorCode::kBudgetTooSmall, "budget " + std::to_string(budget) +
                                                " is below w_min " + std::to_string(bounds.w_min));
  }
  const std::vector<Index> order = scores.ranking();
  const std::vector<double> sorted = ranked_scores(scores, order);

  for (Index k = sorted.size(); k >= 1; --k) {
    PrefixAllocation alloc = allocate_sorted_prefix(sorted, budget, bounds, k);
    if (!alloc.feasible) continue;
    std::vector<Index> ranking;
    ranking.reserve(order.size());
    for (Index pos : order) ranking.push_back(scores.entries()[pos].frame);
    std::vector<Index> retained(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<Resolution> resolutions;
    resolutions.reserve(k);
    for (int w : alloc.tokens) {
      resolutions.push_back(tokens_to_resolution(w, geometry.height_px, geometry.width_px));
    }
    return AllocationPlan(std::move(ranking), std::move(retained), std::move(alloc.tokens),
                          std::move(resolutions), budget, bounds);
  }
  // Unreachable: k = 1 always fits once budget >= w_min.
  throw Error(ErrorCode::kBudgetTooSmall, "no feasible prefix");
}

namespace {

SelectionTrace select_candidates(const ConditionedFeatures& features, Index pool,
                                 const RunConfig& config) {
  if (config.chunks == 1) return greedy_feature_space(features, pool, config.rank_epsilon);
  if (pool % config.chunks != 0) {
    throw Error(ErrorCode::kInvalidPartition, "candidate pool " + std::to_string(pool) +
                                                  " is not divisible by " +
                                                  std::to_string(config.chunks) + " chunks");
  }
  return chunked_select(features, config.chunks, pool / config.chunks, config.rank_epsilon);
}

}  // namespace

PipelineResult build_pipeline(const EmbeddingSet& embeddings, const RunConfig& config) {
  config.validate();
  const Index frame_count = embeddings.frame_count();
  const ConditionedFeatures features = build_phi(embeddings);
  const long long budget = config.token_budget();

  if (config.mode == Mode::kFixed) {
    if (config.frame_budget > frame_count) {
      throw Error(ErrorCode::kInvalidBudget, "fixed mode needs F <= T (F=" +
                                                 std::to_string(config.frame_budget) +
                                                 ", T=" + std::to_string(frame_count) + ")");
    }
    SelectionTrace trace = select_candidates(features, config.frame_budget, config);
    ImportanceTable scores =
        score_candidates(features, trace.selected(), config.tau, config.gram_jitter);
    std::vector<Index> ranking;
    for (Index pos : scores.ranking()) ranking.push_back(scores.entries()[pos].frame);
    std::vector<int> tokens(ranking.size(), config.bounds.w_max);
    const Resolution res = tokens_to_resolution(config.bounds.w_max, config.geometry.height_px,
                                                config.geometry.width_px);
    std::vector<Resolution> resolutions(ranking.size(), res);
    std::vector<Index> retained = ranking;
    AllocationPlan plan(std::move(ranking), std::move(retained), std::move(tokens),
                        std::move(resolutions), budget, config.bounds);
    return {std::move(trace), std::move(scores), std::move(plan)};
  }

  const auto requested =
      static_cast<Index>(std::ceil(config.pool_multiplier * static_cast<double>(config.frame_budget)));
  const Index pool = std::min(requested, frame_count);
  SelectionTrace trace = select_candidates(features, pool, config);
  ImportanceTable scores =
      score_candidates(features, trace.selected(), config.tau, config.gram_jitter);
  AllocationPlan plan = largest_feasible_prefix(scores, budget, config.bounds, config.geometry);
  return {std::move(trace), std::move(scores), std::move(plan)};
}

}  // namespace lddr
