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

#include "lddr/gd.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace lddr;
using namespace lddr::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected lddr::Error");
  return ErrorCode::kInvariantViolation;
}

std::vector<Index> random_subset(Index frames, Index size, std::mt19937_64& rng) {
  std::vector<Index> all = iota_indices(frames);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size);
  return all;
}

}  // namespace

TEST_CASE("gd_logdet hand instances") {
  const ConditionedFeatures f = random_features(4, 3, 2);
  const Vector single = gd_logdet(f, {2});
  CHECK(single[0] == doctest::Approx(f.row_norms_sq()[2] + kGramJitter).epsilon(1e-12));

  const Vector ortho = gd_logdet(features_from_rows(Matrix::Identity(2, 2)), {0, 1});
  CHECK(std::abs(ortho[0] - 1.0) <= 1e-6);
  CHECK(std::abs(ortho[1] - 1.0) <= 1e-6);

  // det [[1, c], [c, 1]] = 1 - cos^2 = sin^2(30 deg) = 0.25.
  const double theta = std::numbers::pi / 6.0;
  Matrix rows(2, 2);
  rows << 1.0, 0.0, std::cos(theta), std::sin(theta);
  const Vector tilted = gd_logdet(features_from_rows(rows), {0, 1});
  CHECK(std::abs(tilted[0] - 0.25) <= 1e-6);
  CHECK(std::abs(tilted[1] - 0.25) <= 1e-6);

  CHECK(code_of([&] { gd_logdet(f, {}); }) == ErrorCode::kEmptySet);
  CHECK(code_of([&] { gd_logdet(f, {1, 1}); }) == ErrorCode::kDuplicateIndex);
  CHECK(code_of([&] { gd_logdet(f, {9}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("gd_residual hand instances") {
  Matrix rows(3, 3);
  rows << 0.5, 0.0, 0.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.3;
  const Vector ortho = gd_residual(features_from_rows(rows), {0, 1, 2});
  CHECK(std::abs(ortho[0] - 0.25) <= 1e-7);
  CHECK(std::abs(ortho[1] - 0.64) <= 1e-7);
  CHECK(std::abs(ortho[2] - 0.09) <= 1e-7);

  Matrix span(3, 3);
  span << 0.6, 0.0, 0.0, 0.0, 0.7, 0.0, 0.3, 0.35, 0.0;
  const Vector in_span = gd_residual(features_from_rows(span), {0, 1, 2});
  CHECK(std::abs(in_span[2]) <= 1e-8);

  const ConditionedFeatures f = random_features(20, 10, 31);
  std::mt19937_64 rng(4);
  const std::vector<Index> s = random_subset(20, 6, rng);
  const Vector a = gd_logdet(f, s);
  const Vector b = gd_residual(f, s);
  for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(near_rel(a[i], b[i], 1e-5));

  CHECK(code_of([&] { gd_residual(f, {}); }) == ErrorCode::kEmptySet);
  CHECK(code_of([&] { gd_residual(f, {3, 3}); }) == ErrorCode::kDuplicateIndex);
}

TEST_CASE("density_prior") {
  const Vector equal = density_prior(features_from_rows(Matrix::Identity(3, 3) * 0.5), {0, 1, 2});
  for (int i = 0; i < 3; ++i) CHECK(equal[i] == doctest::Approx(1.0));

  // Squared norms (1, 0): mean 1/2.
  Matrix two(2, 2);
  two << 1.0, 0.0, 0.0, 0.0;
  const Vector r2 = density_prior(features_from_rows(two), {0, 1});
  CHECK(r2[0] == doctest::Approx(2.0));
  CHECK(r2[1] == 0.0);

  // Squared norms proportional to (1, 2, 3): mean 2.
  Matrix three = Matrix::Zero(3, 2);
  three(0, 0) = std::sqrt(1.0 / 3.0);
  three(1, 0) = std::sqrt(2.0 / 3.0);
  three(2, 1) = 1.0;
  const Vector r3 = density_prior(features_from_rows(three), {0, 1, 2});
  CHECK(r3[0] == doctest::Approx(0.5));
  CHECK(r3[1] == doctest::Approx(1.0));
  CHECK(r3[2] == doctest::Approx(1.5));

  Matrix zeros = Matrix::Zero(2, 2);
  zeros(0, 0) = 1.0;
  CHECK(code_of([&] { density_prior(features_from_rows(zeros), {1}); }) ==
        ErrorCode::kDegenerateNorms);
}

TEST_CASE("density_aware_score") {
  Vector gd(2);
  gd << 0.25, 0.25;
  Vector rho(2);
  rho << 0.5, 1.5;
  const ImportanceTable t = density_aware_score({3, 8}, gd, rho, 1.0);
  CHECK(t.entries()[0].density_aware == doctest::Approx(0.125));
  CHECK(t.entries()[1].density_aware == doctest::Approx(0.375));

  const ImportanceTable off = density_aware_score({3, 8}, gd, rho, 0.0);
  CHECK(off.entries()[0].density_aware == 0.25);
  CHECK(off.entries()[1].density_aware == 0.25);

  const ImportanceTable flat = density_aware_score({3, 8}, gd, Vector::Ones(2), 2.5);
  CHECK(flat.entries()[0].density_aware == 0.25);

  Vector zero_rho(2);
  zero_rho << 0.0, 2.0;
  const ImportanceTable zpow = density_aware_score({3, 8}, gd, zero_rho, 0.0);
  CHECK(zpow.entries()[0].density_aware == 0.25);

  CHECK(code_of([&] { density_aware_score({3}, gd, rho, 1.0); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { density_aware_score({3, 8}, gd, rho, -0.5); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("zero-relevance frame scores at jitter scale and sorts last") {
  Matrix rows(3, 3);
  rows << 0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0;
  const ImportanceTable t = score_candidates(features_from_rows(rows), {0, 1, 2}, 1.0);
  CHECK(t.entries()[1].gd_score <= 2 * kGramJitter);
  CHECK(t.entries()[1].density == 0.0);
  CHECK(t.entries()[1].density_aware == 0.0);
  CHECK(t.entries()[t.ranking().back()].frame == 1);
}

TEST_CASE("property: residual never increases as the basis set grows") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Index dim = 2 + rng() % 30;
    const Index frames = 4 + rng() % 30;
    const ConditionedFeatures f = random_features(frames, dim, rng());
    std::vector<Index> order = random_subset(frames, frames, rng);
    const Index t = order.back();
    order.pop_back();
    const Index b_size = rng() % (order.size() + 1);
    const Index a_size = b_size == 0 ? 0 : rng() % (b_size + 1);
    const std::vector<Index> b(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b_size));
    const std::vector<Index> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(a_size));
    CHECK(projection_residual(f, t, b).residual_sq <= projection_residual(f, t, a).residual_sq + 1e-8);
  }
}

TEST_CASE("property: cross-form identity, bound, volume factorization, tau=0 ranking") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const Index dim = 2 + rng() % 63;
    const Index size = 1 + rng() % 20;
    const Index frames = size + rng() % 20;
    const ConditionedFeatures f = random_features(frames, dim, rng());
    const std::vector<Index> s = random_subset(frames, size, rng);
    const Vector logdet = gd_logdet(f, s);
    for (Index i = 0; i < size; ++i) {
      std::vector<Index> rest = s;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      const ProjectionResidual r = projection_residual(f, s[i], rest);
      const double schur = r.residual_sq + kGramJitter * (1.0 + r.coef_norm_sq);
      CHECK(near_rel(logdet[static_cast<Eigen::Index>(i)], schur, 1e-5));

      const double rel = f.relevance()[static_cast<Eigen::Index>(s[i])];
      CHECK(logdet[static_cast<Eigen::Index>(i)] >= 0.0);
      CHECK(logdet[static_cast<Eigen::Index>(i)] <= rel * rel + 1e-6);

      const double full = lu_gram_det(f.phi(), s, kGramJitter);
      const double part = lu_gram_det(f.phi(), rest, kGramJitter);
      CHECK(near_rel(full, part * logdet[static_cast<Eigen::Index>(i)], 1e-5));
    }

    double norm_mass = 0.0;
    for (Index t : s) norm_mass += f.row_norms_sq()[static_cast<Eigen::Index>(t)];
    if (norm_mass == 0.0) {
      CHECK_THROWS_AS(score_candidates(f, s, 0.0), Error);
      continue;
    }
    const ImportanceTable plain = score_candidates(f, s, 0.0);
    std::vector<Index> by_gd = iota_indices(size);
    std::stable_sort(by_gd.begin(), by_gd.end(), [&](Index x, Index y) {
      if (logdet[static_cast<Eigen::Index>(x)] != logdet[static_cast<Eigen::Index>(y)]) {
        return logdet[static_cast<Eigen::Index>(x)] > logdet[static_cast<Eigen::Index>(y)];
      }
      return s[x] < s[y];
    });
    CHECK(plain.ranking() == by_gd);
  }
}
