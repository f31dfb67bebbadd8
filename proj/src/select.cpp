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

#include "lddr/select.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lddr {

namespace {

void check_budget(Index budget, Index frame_count) {
  if (budget < 1 || budget > frame_count) {
    throw Error(ErrorCode::kInvalidBudget, "budget K=" + std::to_string(budget) +
                                               " must lie in [1, " + std::to_string(frame_count) +
                                               "]");
  }
}

// Index of the largest gain among unselected frames; strict comparison keeps
// the lowest index on ties.
Index argmax_unselected(const Vector& gains, const std::vector<char>& taken) {
  Index best = gains.size();
  double best_gain = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < gains.size(); ++t) {
    if (taken[t]) continue;
    if (gains[t] > best_gain) {
      best_gain = gains[t];
      best = static_cast<Index>(t);
    }
  }
  return best;
}

constexpr double kReorthogonalizeThreshold = 1e-4;

}  // namespace

SelectionTrace greedy_feature_space(const ConditionedFeatures& features, Index budget,
                                    double rank_epsilon) {
  const Matrix& phi = features.phi();
  const Index frame_count = features.frame_count();
  const Eigen::Index dim = phi.cols();
  check_budget(budget, frame_count);

  Vector gains = features.row_norms_sq();
  std::vector<char> taken(frame_count, 0);
  Matrix basis(static_cast<Eigen::Index>(budget), dim);
  std::vector<Index> selected;
  std::vector<double> step_gains;
  selected.reserve(budget);
  step_gains.reserve(budget);
  bool exhausted = false;

  Vector projection(static_cast<Eigen::Index>(frame_count));
  for (Index i = 0; i < budget; ++i) {
    const Index j = argmax_unselected(gains, taken);
    const double gain = gains[static_cast<Eigen::Index>(j)];
    if (!(gain > rank_epsilon)) {
      exhausted = true;
      break;
    }
    const auto prior = basis.topRows(static_cast<Eigen::Index>(i));
    Vector v = phi.row(static_cast<Eigen::Index>(j)).transpose();
    if (i > 0) v.noalias() -= prior.transpose() * (prior * v);

    Vector direction;
    const double ratio = v.squaredNorm() / gain;
    if (std::abs(ratio - 1.0) > kReorthogonalizeThreshold && i > 0) {
      v.noalias() -= prior.transpose() * (prior * v);
      direction = v / v.norm();
    } else {
      direction = v / std::sqrt(gain);
    }
    basis.row(static_cast<Eigen::Index>(i)) = direction.transpose();

    taken[j] = 1;
    selected.push_back(j);
    step_gains.push_back(gain);

    projection.noalias() = phi * direction;
    gains = (gains.array() - projection.array().square()).cwiseMax(0.0).matrix();
  }

  basis.conservativeResize(static_cast<Eigen::Index>(selected.size()), dim);
  return SelectionTrace(std::move(selected), std::move(step_gains), std::move(basis), exhausted);
}

SelectionTrace greedy_kernel_space(const Matrix& kernel, Index budget, double rank_epsilon) {
  if (kernel.rows() != kernel.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel must be square");
  }
  if (!kernel.allFinite()) throw Error(ErrorCode::kNonFinite, "kernel contains non-finite values");
  const double asymmetry = (kernel - kernel.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-8) {
    throw Error(ErrorCode::kAsymmetricKernel,
                "kernel asymmetry " + std::to_string(asymmetry) + " exceeds 1e-8");
  }
  const Index frame_count = static_cast<Index>(kernel.rows());
  check_budget(budget, frame_count);

  Vector gains = kernel.diagonal();
  std::vector<char> taken(frame_count, 0);
  // Row i holds e_i, the i-th column of the incremental Cholesky factor.
  Matrix factor(static_cast<Eigen::Index>(budget), kernel.rows());
  std::vector<Index> selected;
  std::vector<double> step_gains;
  bool exhausted = false;

  for (Index i = 0; i < budget; ++i) {
    const Index j = argmax_unselected(gains, taken);
    const double gain = gains[static_cast<Eigen::Index>(j)];
    if (!(gain > rank_epsilon)) {
      exhausted = true;
      break;
    }
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    Vector e = kernel.row(jj).transpose();
    if (i > 0) {
      const auto prior = factor.topRows(ii);
      e.noalias() -= prior.transpose() * prior.col(jj);
    }
    e /= std::sqrt(gain);
    factor.row(ii) = e.transpose();

    taken[j] = 1;
    selected.push_back(j);
    step_gains.push_back(gain);
    gains = (gains.array() - e.array().square()).cwiseMax(0.0).matrix();
  }
  return SelectionTrace(std::move(selected), std::move(step_gains), Matrix(), exhausted);
}

double subset_logdet(const Matrix& kernel, const std::vector<Index>& subset, double jitter) {
  const auto n = static_cast<Eigen::Index>(subset.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      sub(a, b) = kernel(static_cast<Eigen::Index>(subset[a]), static_cast<Eigen::Index>(subset[b]));
    }
  }
  sub.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

ExhaustiveResult exhaustive_map(const Matrix& kernel, Index k, double jitter) {
  if (kernel.rows() != kernel.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel must be square");
  }
  const Index n = static_cast<Index>(kernel.rows());
  check_budget(k, n);
  double combos = 1.0;
  for (Index i = 0; i < k; ++i) {
    combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  if (combos > kExhaustiveCap) {
    throw Error(ErrorCode::kCapExceeded,
                "binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") exceeds 1e6");
  }

  std::vector<Index> subset(k);
  for (Index i = 0; i < k; ++i) subset[i] = i;
  ExhaustiveResult best{subset, -std::numeric_limits<double>::infinity()};
  while (true) {
    const double value = subset_logdet(kernel, subset, jitter);
    if (value > best.logdet) best = {subset, value};
    // Next combination in lexicographic order.
    Index pos = k;
    while (pos > 0 && subset[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (Index i = pos; i < k; ++i) subset[i] = subset[i - 1] + 1;
  }
  return best;
}

std::vector<Index> chunk_bounds(Index frame_count, Index chunks) {
  if (chunks < 1 || chunks > frame_count) {
    throw Error(ErrorCode::kInvalidPartition, "cannot split " + std::to_string(frame_count) +
                                                  " frames into " + std::to_string(chunks) +
                                                  " chunks");
  }
  const Index base = frame_count / chunks;
  const Index extra = frame_count % chunks;
  std::vector<Index> bounds{0};
  for (Index c = 0; c < chunks; ++c) {
    bounds.push_back(bounds.back() + base + (c < extra ? 1 : 0));
  }
  return bounds;
}

SelectionTrace chunked_select(const ConditionedFeatures& features, Index chunks, Index per_chunk,
                              double rank_epsilon) {
  if (per_chunk < 1) throw Error(ErrorCode::kInvalidBudget, "per-chunk budget must be >= 1");
  const Index frame_count = features.frame_count();
  if (chunks < 1 || chunks * per_chunk > frame_count) {
    throw Error(ErrorCode::kInvalidPartition,
                std::to_string(chunks) + " chunks x " + std::to_string(per_chunk) +
                    " frames exceeds T=" + std::to_string(frame_count));
  }
  const std::vector<Index> bounds = chunk_bounds(frame_count, chunks);

  std::vector<Index> selected;
  std::vector<double> gains;
  bool exhausted = false;
  for (Index c = 0; c < chunks; ++c) {
    const auto begin = static_cast<Eigen::Index>(bounds[c]);
    const auto length = static_cast<Eigen::Index>(bounds[c + 1] - bounds[c]);
    if (static_cast<Index>(length) < per_chunk) {
      throw Error(ErrorCode::kInvalidPartition,
                  "chunk " + std::to_string(c) + " has fewer than " + std::to_string(per_chunk) +
                      " frames");
    }
    ConditionedFeatures span(features.phi().middleRows(begin, length),
                             features.relevance().segment(begin, length));
    const SelectionTrace local = greedy_feature_space(span, per_chunk, rank_epsilon);
    for (Index i = 0; i < local.size(); ++i) {
      selected.push_back(local.selected()[i] + bounds[c]);
      gains.push_back(local.gains()[i]);
    }
    exhausted = exhausted || local.exhausted();
  }
  return SelectionTrace(std::move(selected), std::move(gains), Matrix(), exhausted);
}

}  // namespace lddr
