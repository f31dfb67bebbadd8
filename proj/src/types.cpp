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

#include "lddr/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace lddr {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kNonFinite: return "non-finite-value";
    case ErrorCode::kZeroNorm: return "zero-norm-row";
    case ErrorCode::kInvalidBudget: return "invalid-budget";
    case ErrorCode::kCapExceeded: return "cap-exceeded";
    case ErrorCode::kAsymmetricKernel: return "asymmetric-kernel";
    case ErrorCode::kDuplicateIndex: return "duplicate-index";
    case ErrorCode::kEmptySet: return "empty-set";
    case ErrorCode::kDegenerateNorms: return "all-zero-norms";
    case ErrorCode::kInvalidBounds: return "invalid-bounds";
    case ErrorCode::kBudgetTooSmall: return "budget-too-small";
    case ErrorCode::kInvalidPartition: return "invalid-partition";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kTruncatedFile: return "truncated-file";
    case ErrorCode::kTrailingBytes: return "trailing-bytes";
    case ErrorCode::kIoFailure: return "io-failure";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kInvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

namespace {

void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

bool near_relative(double actual, double expected, double rel) {
  return std::abs(actual - expected) <= rel * std::abs(expected) + 1e-15;
}

}  // namespace

EmbeddingSet::EmbeddingSet(Matrix frames, Vector query)
    : frames_(std::move(frames)), query_(std::move(query)) {
  require(frames_.rows() >= 1 && frames_.cols() >= 1, ErrorCode::kDimensionMismatch,
          "embedding set needs at least one frame and one dimension");
  require(query_.size() == frames_.cols(), ErrorCode::kDimensionMismatch,
          "query length " + std::to_string(query_.size()) + " != frame dim " +
              std::to_string(frames_.cols()));
  require(frames_.allFinite(), ErrorCode::kNonFinite, "frame embeddings contain non-finite values");
  require(query_.allFinite(), ErrorCode::kNonFinite, "query embedding contains non-finite values");
  for (Eigen::Index t = 0; t < frames_.rows(); ++t) {
    require(frames_.row(t).squaredNorm() > 0.0, ErrorCode::kZeroNorm,
            "frame " + std::to_string(t) + " has zero norm");
  }
  require(query_.squaredNorm() > 0.0, ErrorCode::kZeroNorm, "query embedding has zero norm");
}

ConditionedFeatures::ConditionedFeatures(Matrix phi, Vector relevance)
    : phi_(std::move(phi)), relevance_(std::move(relevance)) {
  require(phi_.rows() >= 1 && phi_.cols() >= 1, ErrorCode::kDimensionMismatch,
          "conditioned features need at least one row and column");
  require(relevance_.size() == phi_.rows(), ErrorCode::kDimensionMismatch,
          "relevance length does not match frame count");
  require(phi_.allFinite() && relevance_.allFinite(), ErrorCode::kNonFinite,
          "conditioned features contain non-finite values");
  row_norms_sq_ = phi_.rowwise().squaredNorm();
  for (Eigen::Index t = 0; t < phi_.rows(); ++t) {
    const double r = relevance_[t];
    require(r >= 0.0 && r <= 1.0, ErrorCode::kInvariantViolation,
            "relevance[" + std::to_string(t) + "] outside [0,1]");
    require(near_relative(std::sqrt(row_norms_sq_[t]), r, 1e-9), ErrorCode::kInvariantViolation,
            "phi row " + std::to_string(t) + " norm does not match its relevance");
  }
}

SelectionTrace::SelectionTrace(std::vector<Index> selected, std::vector<double> gains,
                               Matrix basis, bool exhausted)
    : selected_(std::move(selected)),
      gains_(std::move(gains)),
      basis_(std::move(basis)),
      exhausted_(exhausted) {
  require(gains_.size() == selected_.size(), ErrorCode::kDimensionMismatch,
          "trace gains and indices differ in length");
  std::unordered_set<Index> seen;
  for (Index j : selected_) {
    require(seen.insert(j).second, ErrorCode::kDuplicateIndex,
            "frame " + std::to_string(j) + " selected twice");
  }
  for (double g : gains_) {
    require(std::isfinite(g) && g > 0.0, ErrorCode::kInvariantViolation,
            "trace gain must be positive");
  }
  if (basis_.size() == 0) return;
  require(static_cast<Index>(basis_.rows()) == selected_.size(), ErrorCode::kDimensionMismatch,
          "basis rows do not match selection length");
  const Matrix gram = basis_ * basis_.transpose();
  const double deviation = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  require(deviation <= 1e-6, ErrorCode::kInvariantViolation,
          "basis is not orthonormal (deviation " + std::to_string(deviation) + ")");
}

ImportanceTable::ImportanceTable(std::vector<ImportanceEntry> entries, double tau)
    : entries_(std::move(entries)), tau_(tau) {
  require(std::isfinite(tau_) && tau_ >= 0.0, ErrorCode::kInvalidArgument, "tau must be >= 0");
  std::unordered_set<Index> seen;
  double density_sum = 0.0;
  for (const auto& e : entries_) {
    require(seen.insert(e.frame).second, ErrorCode::kDuplicateIndex,
            "frame " + std::to_string(e.frame) + " appears twice in importance table");
    require(std::isfinite(e.gd_score) && e.gd_score >= 0.0 && std::isfinite(e.density) &&
                e.density >= 0.0 && std::isfinite(e.density_aware) && e.density_aware >= 0.0,
            ErrorCode::kInvariantViolation, "importance values must be finite and nonnegative");
    density_sum += e.density;
  }
  if (!entries_.empty()) {
    const double mean = density_sum / static_cast<double>(entries_.size());
    require(std::abs(mean - 1.0) <= 1e-9, ErrorCode::kInvariantViolation,
            "density prior does not average to 1");
  }
}

std::vector<Index> ImportanceTable::ranking() const {
  std::vector<Index> order(entries_.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [this](Index a, Index b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    if (ea.density_aware != eb.density_aware) return ea.density_aware > eb.density_aware;
    return ea.frame < eb.frame;
  });
  return order;
}

AllocationPlan::AllocationPlan(std::vector<Index> ranking, std::vector<Index> retained,
                               std::vector<int> tokens, std::vector<Resolution> resolutions,
                               long long budget, TokenBounds bounds)
    : ranking_(std::move(ranking)),
      retained_(std::move(retained)),
      tokens_(std::move(tokens)),
      resolutions_(std::move(resolutions)),
      budget_(budget),
      bounds_(bounds) {
  require(bounds_.w_min > 0 && bounds_.w_min <= bounds_.w_max, ErrorCode::kInvalidBounds,
          "token bounds must satisfy 0 < w_min <= w_max");
  require(tokens_.size() == retained_.size() && resolutions_.size() == retained_.size(),
          ErrorCode::kDimensionMismatch, "plan vectors differ in length");
  require(retained_.size() <= ranking_.size() &&
              std::equal(retained_.begin(), retained_.end(), ranking_.begin()),
          ErrorCode::kInvariantViolation, "retained frames are not a prefix of the ranking");
  for (Index i = 0; i < tokens_.size(); ++i) {
    const int w = tokens_[i];
    require(w >= bounds_.w_min && w <= bounds_.w_max, ErrorCode::kInvariantViolation,
            "token count " + std::to_string(w) + " outside bounds");
    const Resolution& r = resolutions_[i];
    require(r.height_px > 0 && r.width_px > 0 && r.height_px % kPatchSize == 0 &&
                r.width_px % kPatchSize == 0,
            ErrorCode::kInvariantViolation, "resolution is not a positive multiple of the patch");
    require(static_cast<long long>(r.height_px / kPatchSize) * (r.width_px / kPatchSize) <= w,
            ErrorCode::kInvariantViolation, "resolution needs more patches than its token grant");
    total_tokens_ += w;
  }
  require(total_tokens_ <= budget_, ErrorCode::kInvariantViolation,
          "plan total " + std::to_string(total_tokens_) + " exceeds budget " +
              std::to_string(budget_));
}

std::vector<Index> AllocationPlan::temporal_order() const {
  std::vector<Index> order(retained_.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [this](Index a, Index b) { return retained_[a] < retained_[b]; });
  return order;
}

}  // namespace lddr
