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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lddr/alloc.hpp"
#include "lddr/gd.hpp"
#include "lddr/kernel.hpp"
#include "lddr/select.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace lddr;
using namespace lddr::testing;

namespace {

ImportanceTable table_from_scores(const std::vector<double>& scores) {
  std::vector<ImportanceEntry> entries;
  for (Index i = 0; i < scores.size(); ++i) entries.push_back({i, scores[i], 1.0, scores[i]});
  return ImportanceTable(std::move(entries), 1.0);
}

// Exhaustive oracle: evaluate every prefix size with its own clamp arithmetic
// and keep the largest that fits.
Index brute_k_star(std::vector<double> scores, long long budget, int w_min, int w_max) {
  std::sort(scores.begin(), scores.end(), std::greater<>());
  Index best = 0;
  for (Index k = 1; k <= scores.size(); ++k) {
    double sum = 0.0;
    for (Index i = 0; i < k; ++i) sum += scores[i];
    long long total = 0;
    for (Index i = 0; i < k; ++i) {
      const double raw = sum > 0 ? budget * scores[i] / sum : static_cast<double>(budget) / k;
      double w = std::min<double>(w_max, std::max<double>(w_min, raw));
      total += std::max<long long>(w_min, static_cast<long long>(std::floor(w + 1e-9)));
    }
    if (total <= budget) best = k;
  }
  return best;
}

EmbeddingSet orthonormal_equal_relevance(Index frames) {
  return EmbeddingSet(Matrix::Identity(frames, frames), Vector::Ones(frames));
}

}  // namespace

TEST_CASE("prefix_allocation hand cases") {
  const TokenBounds bounds{256, 1024};
  const PrefixAllocation fit = prefix_allocation(table_from_scores({1, 1, 1, 1}), 4096, bounds, 4);
  CHECK(fit.tokens == std::vector<int>{1024, 1024, 1024, 1024});
  CHECK(fit.total == 4096);
  CHECK(fit.feasible);

  const PrefixAllocation skewed = prefix_allocation(table_from_scores({3, 1}), 2048, bounds, 2);
  CHECK(skewed.tokens == std::vector<int>{1024, 512});
  CHECK(skewed.total == 1536);
  CHECK(skewed.feasible);

  const PrefixAllocation crowded =
      prefix_allocation(table_from_scores(std::vector<double>(9, 1.0)), 2048, bounds, 9);
  CHECK(crowded.tokens == std::vector<int>(9, 256));
  CHECK(crowded.total == 2304);
  CHECK_FALSE(crowded.feasible);

  // Scores are ranked before prefixing, so (1, 3) allocates like (3, 1).
  CHECK(prefix_allocation(table_from_scores({1, 3}), 2048, bounds, 1).tokens ==
        std::vector<int>{1024});

  const PrefixAllocation zeros = prefix_allocation(table_from_scores({0, 0}), 1024, bounds, 2);
  CHECK(zeros.tokens == std::vector<int>{512, 512});

  CHECK_THROWS_AS(prefix_allocation(table_from_scores({1}), 1024, TokenBounds{512, 256}, 1), Error);
  CHECK_THROWS_AS(prefix_allocation(table_from_scores({1}), 1024, TokenBounds{0, 256}, 1), Error);
  CHECK_THROWS_AS(prefix_allocation(table_from_scores({1}), 1024, bounds, 2), Error);
}

TEST_CASE("largest_feasible_prefix") {
  const TokenBounds bounds{256, 1024};
  const AllocationPlan plan =
      largest_feasible_prefix(table_from_scores(std::vector<double>(16, 0.5)), 8 * 1024, bounds);
  CHECK(plan.k_star() == 16);
  CHECK(plan.tokens() == std::vector<int>(16, 512));

  const AllocationPlan single = largest_feasible_prefix(table_from_scores({0.7}), 256, bounds);
  CHECK(single.k_star() == 1);
  CHECK(single.tokens() == std::vector<int>{256});

  try {
    largest_feasible_prefix(table_from_scores({0.7}), 100, bounds);
    FAIL("expected budget-too-small");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetTooSmall);
  }
}

TEST_CASE("tokens_to_resolution") {
  CHECK(tokens_to_resolution(1024, 448, 448) == Resolution{448, 448});
  CHECK(tokens_to_resolution(1, 720, 1280) == Resolution{14, 14});
  CHECK(tokens_to_resolution(1, 1280, 720) == Resolution{14, 14});
  CHECK(tokens_to_resolution(256, 720, 1280) == Resolution{168, 294});
  CHECK_THROWS_AS(tokens_to_resolution(0, 10, 10), Error);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const int w = 1 + static_cast<int>(rng() % 2048);
    const int h = 1 + static_cast<int>(rng() % 4000);
    const int wd = 1 + static_cast<int>(rng() % 4000);
    const Resolution r = tokens_to_resolution(w, h, wd);
    CHECK(r.height_px % 14 == 0);
    CHECK(r.width_px % 14 == 0);
    CHECK(r.height_px > 0);
    CHECK(r.width_px > 0);
    CHECK((r.height_px / 14) * (r.width_px / 14) <= w);
  }
}

TEST_CASE("property: k* matches exhaustive scan, budget safety and prefix maximality") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + rng() % 40;
    std::vector<double> scores(n);
    for (double& s : scores) {
      const double u = unit(rng);
      s = u < 0.1 ? 0.0 : std::pow(u, 1 + rng() % 6);
    }
    const int w_min = 1 + static_cast<int>(rng() % 400);
    const int w_max = w_min + static_cast<int>(rng() % 1200);
    const long long budget = w_min + static_cast<long long>(rng() % 20000);
    const TokenBounds bounds{w_min, w_max};
    const ImportanceTable table = table_from_scores(scores);
    const AllocationPlan plan = largest_feasible_prefix(table, budget, bounds);

    CHECK(plan.k_star() == brute_k_star(scores, budget, w_min, w_max));
    CHECK(plan.total_tokens() <= budget);
    for (int w : plan.tokens()) {
      CHECK(w >= w_min);
      CHECK(w <= w_max);
    }
    if (plan.k_star() < n) {
      CHECK_FALSE(prefix_allocation(table, budget, bounds, plan.k_star() + 1).feasible);
    }
  }
}

TEST_CASE("feasibility is not monotone in k") {
  // Floor rounding makes k=4 overflow while k=5 fits; totals per prefix are
  // 13, 12, 12, 14, 13 against a budget of 13.
  const std::vector<double> scores{10, 8, 6, 2, 1};
  const TokenBounds bounds{2, 45};
  std::vector<long long> totals;
  for (Index k = 1; k <= 5; ++k) totals.push_back(allocate_sorted_prefix(scores, 13, bounds, k).total);
  CHECK(totals == std::vector<long long>{13, 12, 12, 14, 13});
  CHECK(largest_feasible_prefix(table_from_scores(scores), 13, bounds).k_star() == 5);
}

TEST_CASE("pipeline fixed mode") {
  RunConfig config;
  config.mode = Mode::kFixed;
  config.frame_budget = 8;
  const EmbeddingSet e = random_embeddings(100, 16, 12);
  const PipelineResult r = build_pipeline(e, config);
  CHECK(r.plan.k_star() == 8);
  CHECK(r.plan.tokens() == std::vector<int>(8, 1024));
  CHECK(r.plan.total_tokens() == 8192);
  CHECK(r.plan.budget() == 8192);

  const SelectionTrace direct = greedy_feature_space(build_phi(e), 8);
  std::vector<Index> a = r.plan.retained();
  std::vector<Index> b = direct.selected();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(r.trace.selected() == direct.selected());

  config.frame_budget = 101;
  CHECK_THROWS_AS(build_pipeline(e, config), Error);
}

TEST_CASE("pipeline dynamic mode") {
  SUBCASE("equal scores keep the whole pool at half resolution") {
    RunConfig config;
    config.frame_budget = 8;
    const PipelineResult r = build_pipeline(orthonormal_equal_relevance(16), config);
    CHECK(r.trace.size() == 16);
    CHECK(r.plan.k_star() == 16);
    CHECK(r.plan.tokens() == std::vector<int>(16, 512));
    CHECK(r.plan.total_tokens() == 8192);
  }
  SUBCASE("dominant candidate takes the full grant") {
    Matrix frames(3, 2);
    frames << 1.0, 0.0, 0.3, std::sqrt(1.0 - 0.09), 0.0, 1.0;
    Vector q(2);
    q << 1.0, 0.0;
    RunConfig config;
    config.frame_budget = 1;
    const PipelineResult r = build_pipeline(EmbeddingSet(frames, q), config);
    CHECK(r.trace.size() == 2);
    REQUIRE(r.plan.k_star() >= 1);
    CHECK(r.plan.retained()[0] == 0);
    CHECK(r.plan.tokens()[0] == 1024);
  }
  SUBCASE("pool is min(2F, T)") {
    RunConfig config;
    config.frame_budget = 8;
    CHECK(build_pipeline(random_embeddings(40, 32, 2), config).trace.size() == 16);
    // The least relevant frame has a zero feature row, so a pool covering
    // every frame stops one short and reports exhaustion.
    const PipelineResult all = build_pipeline(random_embeddings(11, 32, 2), config);
    CHECK(all.trace.size() == 10);
    CHECK(all.trace.exhausted());
    config.pool_multiplier = 1.5;
    CHECK(build_pipeline(random_embeddings(40, 32, 2), config).trace.size() == 12);
  }
  SUBCASE("chunked candidate pool") {
    RunConfig config;
    config.frame_budget = 4;
    config.chunks = 4;
    const PipelineResult r = build_pipeline(random_embeddings(64, 32, 6), config);
    REQUIRE(r.trace.size() == 8);
    for (Index i = 0; i < 8; ++i) CHECK(r.trace.selected()[i] / 16 == i / 2);
    config.chunks = 3;
    CHECK_THROWS_AS(build_pipeline(random_embeddings(64, 32, 6), config), Error);
  }
  SUBCASE("overrides") {
    RunConfig config;
    config.frame_budget = 4;
    config.bounds = {128, 512};
    config.tau = 0.0;
    const PipelineResult r = build_pipeline(random_embeddings(50, 32, 9), config);
    CHECK(r.plan.budget() == 4 * 512);
    for (int w : r.plan.tokens()) {
      CHECK(w >= 128);
      CHECK(w <= 512);
    }
    CHECK(r.scores.tau() == 0.0);
  }
}

TEST_CASE("property: uniform scores retain min(2F, candidates)") {
  for (Index f = 1; f <= 12; ++f) {
    for (Index candidates : {f, 2 * f, 2 * f + 3}) {
      const AllocationPlan plan = largest_feasible_prefix(
          table_from_scores(std::vector<double>(candidates, 0.4)),
          static_cast<long long>(f) * 1024, TokenBounds{256, 1024});
      CHECK(plan.k_star() >= std::min(2 * f, candidates));
      CHECK(plan.k_star() >= f);
    }
  }
}
