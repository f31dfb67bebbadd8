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

// Domain types shared by the selection pipeline. Every type validates its
// invariants on construction and is immutable afterwards.

#ifndef LDDR_TYPES_HPP
#define LDDR_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lddr {

// Row-major so that a frame is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = std::size_t;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNonFinite,
  kZeroNorm,
  kInvalidBudget,
  kCapExceeded,
  kAsymmetricKernel,
  kDuplicateIndex,
  kEmptySet,
  kDegenerateNorms,
  kInvalidBounds,
  kBudgetTooSmall,
  kInvalidPartition,
  kBadMagic,
  kTruncatedFile,
  kTrailingBytes,
  kIoFailure,
  kParseError,
  kInvariantViolation,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// T frame embeddings plus one query embedding, as produced by the encoder.
class EmbeddingSet {
 public:
  EmbeddingSet(Matrix frames, Vector query);

  const Matrix& frames() const { return frames_; }
  const Vector& query() const { return query_; }
  Index frame_count() const { return static_cast<Index>(frames_.rows()); }
  Index dim() const { return static_cast<Index>(frames_.cols()); }

 private:
  Matrix frames_;
  Vector query_;
};

// Query-conditioned features: row t of phi is relevance[t] times the
// unit-normalized frame embedding, so the DPP kernel is phi * phi^T.
class ConditionedFeatures {
 public:
  ConditionedFeatures(Matrix phi, Vector relevance);

  const Matrix& phi() const { return phi_; }
  const Vector& relevance() const { return relevance_; }
  const Vector& row_norms_sq() const { return row_norms_sq_; }
  Index frame_count() const { return static_cast<Index>(phi_.rows()); }
  Index dim() const { return static_cast<Index>(phi_.cols()); }

 private:
  Matrix phi_;
  Vector relevance_;
  Vector row_norms_sq_;
};

// Ordered output of greedy MAP inference. `basis` holds the orthonormal
// directions built by the feature-space solver; the kernel-space solver works
// in sample space and leaves it empty.
class SelectionTrace {
 public:
  SelectionTrace(std::vector<Index> selected, std::vector<double> gains, Matrix basis,
                 bool exhausted);

  const std::vector<Index>& selected() const { return selected_; }
  const std::vector<double>& gains() const { return gains_; }
  const Matrix& basis() const { return basis_; }
  bool exhausted() const { return exhausted_; }
  Index size() const { return selected_.size(); }

 private:
  std::vector<Index> selected_;
  std::vector<double> gains_;
  Matrix basis_;
  bool exhausted_;
};

struct ImportanceEntry {
  Index frame;
  double gd_score;
  double density;
  double density_aware;
};

// Per-candidate importance. Entries keep the order of the selected set they
// were computed from.
class ImportanceTable {
 public:
  ImportanceTable(std::vector<ImportanceEntry> entries, double tau);

  const std::vector<ImportanceEntry>& entries() const { return entries_; }
  double tau() const { return tau_; }
  Index size() const { return entries_.size(); }

  // Candidate positions sorted by density-aware score descending, ties to the
  // lower frame index.
  std::vector<Index> ranking() const;

 private:
  std::vector<ImportanceEntry> entries_;
  double tau_;
};

struct Resolution {
  int height_px;
  int width_px;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct TokenBounds {
  int w_min = 256;
  int w_max = 1024;
};

class AllocationPlan {
 public:
  // `ranking` is the full candidate list in score order; `retained` must be a
  // prefix of it.
  AllocationPlan(std::vector<Index> ranking, std::vector<Index> retained, std::vector<int> tokens,
                 std::vector<Resolution> resolutions, long long budget, TokenBounds bounds);

  const std::vector<Index>& ranking() const { return ranking_; }
  const std::vector<Index>& retained() const { return retained_; }
  const std::vector<int>& tokens() const { return tokens_; }
  const std::vector<Resolution>& resolutions() const { return resolutions_; }
  long long total_tokens() const { return total_tokens_; }
  long long budget() const { return budget_; }
  TokenBounds bounds() const { return bounds_; }
  Index k_star() const { return retained_.size(); }

  // Positions into retained() ordered by ascending frame index.
  std::vector<Index> temporal_order() const;

 private:
  std::vector<Index> ranking_;
  std::vector<Index> retained_;
  std::vector<int> tokens_;
  std::vector<Resolution> resolutions_;
  long long total_tokens_ = 0;
  long long budget_;
  TokenBounds bounds_;
};

inline constexpr int kPatchSize = 14;

}  // namespace lddr

#endif  // LDDR_TYPES_HPP
