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

// Query-conditioned DPP kernel construction.
//
// The kernel is L = diag(r) S diag(r) with S the cosine similarity of the
// frames and r the min-max normalized query relevance. It factors as
// L = phi * phi^T with phi = diag(r) * normalized_frames, which is what the
// production selector consumes. The dense T x T kernel is only built for the
// reference solver and for tests.

#ifndef LDDR_KERNEL_HPP
#define LDDR_KERNEL_HPP

#include "lddr/types.hpp"

namespace lddr {

inline constexpr Index kDefaultKernelCap = 20000;

Matrix normalize_frames(const EmbeddingSet& embeddings);

// Cosine similarity of each (already unit-norm) frame row with the query.
Vector compute_relevance(const Matrix& normalized_frames, const Vector& query);

// Maps to [0,1]. A constant input carries no query signal and maps to all ones.
Vector minmax_normalize(const Vector& raw);

ConditionedFeatures build_phi(const EmbeddingSet& embeddings);

// Dense L = phi * phi^T. Throws kCapExceeded when T > cap.
Matrix materialize_kernel(const ConditionedFeatures& features, Index cap = kDefaultKernelCap);

}  // namespace lddr

#endif  // LDDR_KERNEL_HPP
