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

// Group-DPP (GD) importance of frames inside a selected set.
//
// The GD score of t in S is the leave-one-out determinant ratio
//   I_t = det(G_S) / det(G_{S \ t}),  G_S = phi_S phi_S^T,
// which equals the squared residual of phi_t after projecting out the span of
// the other selected rows. It is bounded by |phi_t|^2 = relevance_t^2. The
// density prior rho_t = |phi_t|^2 / mean_S |phi_j|^2 scales it as I_t*rho_t^tau.

#ifndef LDDR_GD_HPP
#define LDDR_GD_HPP

#include "lddr/types.hpp"

#include <vector>

namespace lddr {

// Diagonal jitter added to every Gram matrix before factorization.
inline constexpr double kGramJitter = 1e-8;
inline constexpr double kDefaultTau = 1.0;

// Leave-one-out determinant ratio through jittered log-determinants. The
// empty Gram has determinant 1, so a singleton scores |phi_t|^2 + jitter.
Vector gd_logdet(const ConditionedFeatures& features, const std::vector<Index>& selected,
                 double jitter = kGramJitter);

struct ProjectionResidual {
  // |phi_t - Phi_A^T x|^2 for the ridge solution (G_A + jitter I) x = Phi_A phi_t.
  double residual_sq;
  // |x|^2; jittered Schur complement = residual_sq + jitter * (1 + coef_norm_sq).
  double coef_norm_sq;
};

// Residual of phi_t against the span of the rows in `basis_set`.
ProjectionResidual projection_residual(const ConditionedFeatures& features, Index t,
                                       const std::vector<Index>& basis_set,
                                       double jitter = kGramJitter);

// Same scores via the residual form: |(I - P_{S \ t}) phi_t|^2.
Vector gd_residual(const ConditionedFeatures& features, const std::vector<Index>& selected,
                   double jitter = kGramJitter);

Vector density_prior(const ConditionedFeatures& features, const std::vector<Index>& selected);

ImportanceTable density_aware_score(const std::vector<Index>& selected, const Vector& gd,
                                    const Vector& rho, double tau);

// GD (log-det form) + density prior for a selected candidate set.
ImportanceTable score_candidates(const ConditionedFeatures& features,
                                 const std::vector<Index>& selected, double tau = kDefaultTau,
                                 double jitter = kGramJitter);

}  // namespace lddr

#endif  // LDDR_GD_HPP
