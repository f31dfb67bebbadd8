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

#include "lddr/gd.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

namespace lddr {

namespace {

void validate_selection(const ConditionedFeatures& features, const std::vector<Index>& selected) {
  if (selected.empty()) throw Error(ErrorCode::kEmptySet, "selected set is empty");
  std::unordered_set<Index> seen;
  for (Index t : selected) {
    if (t >= features.frame_count()) {
      throw Error(ErrorCode::kInvalidArgument, "frame index " + std::to_string(t) + " out of range");
    }
    if (!seen.insert(t).second) {
      throw Error(ErrorCode::kDuplicateIndex, "frame " + std::to_string(t) + " listed twice");
    }
  }
}

Matrix gather_rows(const Matrix& phi, const std::vector<Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), phi.cols());
  for (Index i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = phi.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

double jittered_gram_logdet(const Matrix& rows, double jitter) {
  if (rows.rows() == 0) return 0.0;
  Eigen::MatrixXd gram = rows * rows.transpose();
  gram.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvariantViolation, "jittered Gram matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

std::vector<Index> without(const std::vector<Index>& set, Index position) {
  std::vector<Index> rest;
  rest.reserve(set.size() - 1);
  for (Index i = 0; i < set.size(); ++i) {
    if (i != position) rest.push_back(set[i]);
  }
  return rest;
}

}  // namespace

Vector gd_logdet(const ConditionedFeatures& features, const std::vector<Index>& selected,
                 double jitter) {
  validate_selection(features, selected);
  const Matrix rows = gather_rows(features.phi(), selected);
  const double full = jittered_gram_logdet(rows, jitter);
  Vector scores(static_cast<Eigen::Index>(selected.size()));
  for (Index i = 0; i < selected.size(); ++i) {
    const double rest = jittered_gram_logdet(gather_rows(features.phi(), without(selected, i)), jitter);
    scores[static_cast<Eigen::Index>(i)] = std::exp(full - rest);
  }
  return scores;
}

ProjectionResidual projection_residual(const ConditionedFeatures& features, Index t,
                                       const std::vector<Index>& basis_set, double jitter) {
  const Eigen::VectorXd target = features.phi().row(static_cast<Eigen::Index>(t)).transpose();
  if (basis_set.empty()) return {target.squaredNorm(), 0.0};
  const Matrix rows = gather_rows(features.phi(), basis_set);
  Eigen::MatrixXd gram = rows * rows.transpose();
  gram.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvariantViolation, "jittered Gram matrix is not positive definite");
  }
  const Eigen::VectorXd coef = llt.solve(rows * target);
  const Eigen::VectorXd residual = target - rows.transpose() * coef;
  return {residual.squaredNorm(), coef.squaredNorm()};
}

Vector gd_residual(const ConditionedFeatures& features, const std::vector<Index>& selected,
                   double jitter) {
  validate_selection(features, selected);
  Vector scores(static_cast<Eigen::Index>(selected.size()));
  for (Index i = 0; i < selected.size(); ++i) {
    scores[static_cast<Eigen::Index>(i)] =
        projection_residual(features, selected[i], without(selected, i), jitter).residual_sq;
  }
  return scores;
}

Vector density_prior(const ConditionedFeatures& features, const std::vector<Index>& selected) {
  validate_selection(features, selected);
  Vector norms(static_cast<Eigen::Index>(selected.size()));
  for (Index i = 0; i < selected.size(); ++i) {
    norms[static_cast<Eigen::Index>(i)] =
        features.row_norms_sq()[static_cast<Eigen::Index>(selected[i])];
  }
  const double mean = norms.mean();
  if (!(mean > 0.0)) {
    throw Error(ErrorCode::kDegenerateNorms, "every selected frame has zero relevance");
  }
  return norms / mean;
}

ImportanceTable density_aware_score(const std::vector<Index>& selected, const Vector& gd,
                                    const Vector& rho, double tau) {
  if (gd.size() != rho.size() || static_cast<Index>(gd.size()) != selected.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "score, prior and selection lengths differ");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be a finite nonnegative value");
  }
  std::vector<ImportanceEntry> entries;
  entries.reserve(selected.size());
  for (Index i = 0; i < selected.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    // std::pow(0, 0) == 1, which is the convention we want for tau = 0.
    entries.push_back({selected[i], gd[ii], rho[ii], gd[ii] * std::pow(rho[ii], tau)});
  }
  return ImportanceTable(std::move(entries), tau);
}

ImportanceTable score_candidates(const ConditionedFeatures& features,
                                 const std::vector<Index>& selected, double tau, double jitter) {
  return density_aware_score(selected, gd_logdet(features, selected, jitter),
                             density_prior(features, selected), tau);
}

}  // namespace lddr
