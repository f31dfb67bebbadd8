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

// Runtime-scaling harness for the two greedy solvers.

#ifndef LDDR_BENCH_HPP
#define LDDR_BENCH_HPP

#include "lddr/kernel.hpp"
#include "lddr/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lddr {

// Gaussian frame rows and a Gaussian query; deterministic in `seed`.
EmbeddingSet synthetic_embeddings(Index frames, Index dim, std::uint64_t seed);

enum class Solver { kFeature, kKernel };
const char* to_string(Solver solver);

struct BenchOptions {
  std::vector<Index> sizes;
  Index dim = 512;
  Index budget = 32;
  Index reps = 5;
  std::uint64_t seed = 0;
  std::vector<Solver> solvers{Solver::kFeature, Solver::kKernel};
  Index kernel_cap = kDefaultKernelCap;
  bool force = false;
};

struct BenchRow {
  Index size;
  Solver solver;
  double median_ms;
  double p10_ms;
  double p90_ms;
};

// Times relevance + phi construction + selection per size and solver. The
// kernel solver also pays for materializing L. Ingestion is excluded.
std::vector<BenchRow> run_bench(const BenchOptions& options);

// Least-squares slope of log(median_ms) against log(size) for one solver.
double loglog_slope(const std::vector<BenchRow>& rows, Solver solver);

// Linear-interpolated percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace lddr

#endif  // LDDR_BENCH_HPP
