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

#include "lddr/bench.hpp"

#include "lddr/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace lddr {

const char* to_string(Solver solver) { return solver == Solver::kFeature ? "feature" : "kernel"; }

EmbeddingSet synthetic_embeddings(Index frames, Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix h(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(dim));
  for (Eigen::Index t = 0; t < h.rows(); ++t) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) h(t, c) = normal(rng);
  }
  Vector q(static_cast<Eigen::Index>(dim));
  for (Eigen::Index c = 0; c < q.size(); ++c) q[c] = normal(rng);
  return EmbeddingSet(std::move(h), std::move(q));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

volatile double g_sink = 0.0;

// Returns something derived from the result so the work cannot be elided.
double time_once(const EmbeddingSet& embeddings, Solver solver, Index budget, Index cap,
                 double& elapsed_ms) {
  const auto start = std::chrono::steady_clock::now();
  const ConditionedFeatures features = build_phi(embeddings);
  double sink = 0.0;
  if (solver == Solver::kFeature) {
    const SelectionTrace trace = greedy_feature_space(features, budget);
    sink = trace.gains().empty() ? 0.0 : trace.gains().back();
  } else {
    const Matrix kernel = materialize_kernel(features, cap);
    const SelectionTrace trace = greedy_kernel_space(kernel, budget);
    sink = trace.gains().empty() ? 0.0 : trace.gains().back();
  }
  const auto stop = std::chrono::steady_clock::now();
  elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return sink;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no sizes to benchmark");
  if (options.reps < 1) throw Error(ErrorCode::kInvalidArgument, "reps must be >= 1");
  if (options.dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  for (Index size : options.sizes) {
    if (options.budget < 1 || options.budget > size) {
      throw Error(ErrorCode::kInvalidBudget, "budget K=" + std::to_string(options.budget) +
                                                 " does not fit size " + std::to_string(size));
    }
    const bool wants_kernel = std::find(options.solvers.begin(), options.solvers.end(),
                                        Solver::kKernel) != options.solvers.end();
    if (wants_kernel && size > options.kernel_cap && !options.force) {
      throw Error(ErrorCode::kCapExceeded, "size " + std::to_string(size) +
                                               " exceeds the kernel materialization cap " +
                                               std::to_string(options.kernel_cap) +
                                               " (pass --force to override)");
    }
  }

  std::vector<BenchRow> rows;
  for (std::size_t s = 0; s < options.sizes.size(); ++s) {
    const Index size = options.sizes[s];
    const EmbeddingSet embeddings = synthetic_embeddings(size, options.dim, options.seed + s);
    for (Solver solver : options.solvers) {
      const Index cap = options.force ? size : options.kernel_cap;
      std::vector<double> times;
      for (Index r = 0; r < options.reps; ++r) {
        double ms = 0.0;
        g_sink = time_once(embeddings, solver, options.budget, cap, ms);
        times.push_back(ms);
      }
      rows.push_back({size, solver, percentile(times, 0.5), percentile(times, 0.1),
                      percentile(times, 0.9)});
    }
  }
  return rows;
}

double loglog_slope(const std::vector<BenchRow>& rows, Solver solver) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : rows) {
    if (row.solver != solver) continue;
    xs.push_back(std::log(static_cast<double>(row.size)));
    ys.push_back(std::log(row.median_ms));
  }
  if (xs.size() < 2) return std::nan("");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::nan("");
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "size,solver,median_ms,p10_ms,p90_ms\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%s,%.6f,%.6f,%.6f\n", row.size, to_string(row.solver),
                  row.median_ms, row.p10_ms, row.p90_ms);
    out << buf;
  }
}

}  // namespace lddr
