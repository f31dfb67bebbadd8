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

#include "lddr/kernel.hpp"

#include <algorithm>
#include <string>

namespace lddr {

Matrix normalize_frames(const EmbeddingSet& embeddings) {
  Matrix out = embeddings.frames();
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    out.row(t) /= out.row(t).norm();
  }
  return out;
}

Vector compute_relevance(const Matrix& normalized_frames, const Vector& query) {
  if (query.size() != normalized_frames.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "query length does not match frame dim");
  }
  const double qnorm = query.norm();
  if (!(qnorm > 0.0)) throw Error(ErrorCode::kZeroNorm, "query embedding has zero norm");
  Vector rel = normalized_frames * (query / qnorm);
  // Rounding can push |cos| a hair past 1.
  return rel.cwiseMax(-1.0).cwiseMin(1.0);
}

Vector minmax_normalize(const Vector& raw) {
  if (raw.size() == 0) return raw;
  if (!raw.allFinite()) throw Error(ErrorCode::kNonFinite, "relevance contains non-finite values");
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) return Vector::Ones(raw.size());
  Vector out = (raw.array() - lo) / (hi - lo);
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

ConditionedFeatures build_phi(const EmbeddingSet& embeddings) {
  Matrix unit = normalize_frames(embeddings);
  Vector relevance = minmax_normalize(compute_relevance(unit, embeddings.query()));
  Matrix phi = relevance.asDiagonal() * unit;
  return ConditionedFeatures(std::move(phi), std::move(relevance));
}

Matrix materialize_kernel(const ConditionedFeatures& features, Index cap) {
  const Index t = features.frame_count();
  if (t > cap) {
    throw Error(ErrorCode::kCapExceeded, "T=" + std::to_string(t) +
                                             " exceeds kernel materialization cap " +
                                             std::to_string(cap));
  }
  const Matrix& phi = features.phi();
  Matrix kernel(phi.rows(), phi.rows());
  kernel.noalias() = phi * phi.transpose();
  // Symmetrize exactly; the product can differ in the last ulp across halves.
  kernel = (0.5 * (kernel + kernel.transpose())).eval();
  return kernel;
}

}  // namespace lddr
