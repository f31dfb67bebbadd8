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

#ifndef LDDR_CONFIG_HPP
#define LDDR_CONFIG_HPP

#include "lddr/gd.hpp"
#include "lddr/select.hpp"
#include "lddr/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace lddr {

enum class Mode { kFixed, kDynamic };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

// Source frame size used to turn token grants into target resolutions.
struct FrameGeometry {
  int height_px = 448;
  int width_px = 448;
};

struct RunConfig {
  // Frame-equivalent budget F; the token budget is F * w_max.
  Index frame_budget = 8;
  Mode mode = Mode::kDynamic;
  TokenBounds bounds;
  double tau = kDefaultTau;
  // Candidate pool size is ceil(pool_multiplier * F), capped at T.
  double pool_multiplier = 2.0;
  Index chunks = 1;
  std::uint64_t seed = 0;
  double rank_epsilon = kRankEpsilon;
  double gram_jitter = kGramJitter;
  FrameGeometry geometry;

  // Throws Error on an inconsistent configuration.
  void validate() const;
  long long token_budget() const;
};

}  // namespace lddr

#endif  // LDDR_CONFIG_HPP
