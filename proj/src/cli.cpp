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

#include "lddr/cli.hpp"

#include "lddr/alloc.hpp"
#include "lddr/bench.hpp"
#include "lddr/io.hpp"
#include "lddr/kernel.hpp"
#include "lddr/select.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

namespace lddr::cli {

namespace {

struct SelectArgs {
  std::string embeddings;
  std::string out;
  Index frames = 8;
  std::string mode = "dynamic";
  double tau = kDefaultTau;
  int w_min = 256;
  int w_max = 1024;
  double pool_mult = 2.0;
  Index chunks = 1;
  std::string frame_size = "448x448";
  double rank_epsilon = kRankEpsilon;
  double jitter = kGramJitter;
};

struct OracleArgs {
  std::string embeddings;
  Index budget = 0;
  double perturb = 0.0;
  std::uint64_t seed = 0;
  Index max_frames = kDefaultKernelCap;
};

struct BenchArgs {
  std::vector<Index> sizes;
  Index dim = 512;
  Index budget = 32;
  Index reps = 5;
  std::uint64_t seed = 0;
  std::string solver = "both";
  std::string out;
  bool force = false;
  Index max_frames = kDefaultKernelCap;
};

FrameGeometry parse_frame_size(const std::string& text) {
  int h = 0;
  int w = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%dx%d%c", &h, &w, &tail) != 2 || h <= 0 || w <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame size must look like HEIGHTxWIDTH, got " + text);
  }
  return {h, w};
}

double relative_deviation(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

int cmd_select(const SelectArgs& args, std::ostream& out) {
  RunConfig config;
  config.frame_budget = args.frames;
  const auto mode = parse_mode(args.mode);
  if (!mode) throw Error(ErrorCode::kInvalidArgument, "mode must be fixed or dynamic");
  config.mode = *mode;
  config.tau = args.tau;
  config.bounds = {args.w_min, args.w_max};
  config.pool_multiplier = args.pool_mult;
  config.chunks = args.chunks;
  config.geometry = parse_frame_size(args.frame_size);
  config.rank_epsilon = args.rank_epsilon;
  config.gram_jitter = args.jitter;
  config.validate();

  const EmbeddingSet embeddings = load_embeddings(args.embeddings);
  const auto start = std::chrono::steady_clock::now();
  const PipelineResult result = build_pipeline(embeddings, config);
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!args.out.empty()) write_plan(result.plan, result.trace, result.scores, config, args.out);

  char line[256];
  std::snprintf(line, sizeof(line),
                "mode=%s candidates=%zu k_star=%zu total_tokens=%lld budget=%lld elapsed_ms=%.3f\n",
                to_string(config.mode), result.trace.size(), result.plan.k_star(),
                result.plan.total_tokens(), result.plan.budget(), elapsed);
  out << line;
  return kExitOk;
}

int cmd_oracle_check(const OracleArgs& args, std::ostream& out) {
  const EmbeddingSet embeddings = load_embeddings(args.embeddings);
  const ConditionedFeatures features = build_phi(embeddings);
  Matrix kernel = materialize_kernel(features, args.max_frames);
  if (args.perturb > 0.0) {
    std::mt19937_64 rng(args.seed);
    std::uniform_real_distribution<double> noise(-args.perturb, args.perturb);
    for (Eigen::Index s = 0; s < kernel.rows(); ++s) {
      for (Eigen::Index t = s; t < kernel.cols(); ++t) {
        const double e = noise(rng);
        kernel(s, t) += e;
        if (t != s) kernel(t, s) += e;
      }
    }
  }

  const SelectionTrace fast = greedy_feature_space(features, args.budget);
  const SelectionTrace reference = greedy_kernel_space(kernel, args.budget);

  double max_dev = 0.0;
  const Index common = std::min(fast.size(), reference.size());
  for (Index i = 0; i < common; ++i) {
    const double dev = relative_deviation(fast.gains()[i], reference.gains()[i]);
    max_dev = std::max(max_dev, dev);
    if (fast.selected()[i] != reference.selected()[i] || dev > 1e-6) {
      char line[256];
      std::snprintf(line, sizeof(line),
                    "FAIL step=%zu feature_frame=%zu kernel_frame=%zu gain_rel_dev=%.3e\n", i,
                    fast.selected()[i], reference.selected()[i], dev);
      out << line;
      return kExitFailure;
    }
  }
  if (fast.size() != reference.size()) {
    char line[256];
    std::snprintf(line, sizeof(line), "FAIL step=%zu feature_len=%zu kernel_len=%zu\n", common,
                  fast.size(), reference.size());
    out << line;
    return kExitFailure;
  }
  char line[160];
  std::snprintf(line, sizeof(line), "PASS steps=%zu max_gain_rel_dev=%.3e\n", common, max_dev);
  out << line;
  return kExitOk;
}

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  BenchOptions options;
  options.sizes = args.sizes;
  options.dim = args.dim;
  options.budget = args.budget;
  options.reps = args.reps;
  options.seed = args.seed;
  options.force = args.force;
  options.kernel_cap = args.max_frames;
  if (args.solver == "feature") {
    options.solvers = {Solver::kFeature};
  } else if (args.solver == "kernel") {
    options.solvers = {Solver::kKernel};
  } else {
    options.solvers = {Solver::kFeature, Solver::kKernel};
  }

  const std::vector<BenchRow> rows = run_bench(options);
  if (!args.out.empty()) {
    std::ofstream csv(args.out);
    if (!csv) throw Error(ErrorCode::kIoFailure, "cannot open " + args.out + " for writing");
    write_bench_csv(rows, csv);
  } else {
    write_bench_csv(rows, out);
  }
  for (Solver solver : options.solvers) {
    char line[128];
    std::snprintf(line, sizeof(line), "slope %s=%.3f\n", to_string(solver),
                  loglog_slope(rows, solver));
    out << line;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budget-aware video frame selection"};
  app.name("lddr");
  app.require_subcommand(1);

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "Select frames and allocate visual tokens");
  select->add_option("--embeddings", select_args.embeddings, "Embedding file (.json or binary)")
      ->required();
  select->add_option("--frames", select_args.frames, "Frame-equivalent budget F")
      ->check(CLI::PositiveNumber);
  select->add_option("--mode", select_args.mode, "fixed or dynamic")
      ->check(CLI::IsMember({"fixed", "dynamic"}));
  select->add_option("--tau", select_args.tau, "Density prior exponent")->check(CLI::NonNegativeNumber);
  select->add_option("--wmin", select_args.w_min, "Minimum tokens per frame")->check(CLI::PositiveNumber);
  select->add_option("--wmax", select_args.w_max, "Maximum tokens per frame")->check(CLI::PositiveNumber);
  select->add_option("--pool-mult", select_args.pool_mult, "Candidate pool multiplier");
  select->add_option("--chunks", select_args.chunks, "Temporal chunks (1 = global)")
      ->check(CLI::PositiveNumber);
  select->add_option("--frame-size", select_args.frame_size, "Source frame size HEIGHTxWIDTH");
  select->add_option("--rank-eps", select_args.rank_epsilon, "Rank-exhaustion threshold");
  select->add_option("--jitter", select_args.jitter, "Gram diagonal jitter");
  select->add_option("--out", select_args.out, "Plan JSON output path");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle-check", "Diff feature-space and kernel-space greedy");
  oracle->add_option("--embeddings", oracle_args.embeddings, "Embedding file")->required();
  oracle->add_option("--budget", oracle_args.budget, "Selection budget K")
      ->required()
      ->check(CLI::PositiveNumber);
  oracle->add_option("--perturb", oracle_args.perturb, "Symmetric kernel noise amplitude (test hook)")
      ->check(CLI::NonNegativeNumber);
  oracle->add_option("--seed", oracle_args.seed, "Noise seed");
  oracle->add_option("--max-frames", oracle_args.max_frames, "Kernel materialization cap");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Runtime scaling of the greedy solvers");
  bench->add_option("--sizes", bench_args.sizes, "Comma-separated frame counts")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--dim", bench_args.dim, "Embedding dim")->check(CLI::PositiveNumber);
  bench->add_option("--budget", bench_args.budget, "Selection budget K")->check(CLI::PositiveNumber);
  bench->add_option("--reps", bench_args.reps, "Repetitions per size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_args.seed, "Generator seed");
  bench->add_option("--solver", bench_args.solver, "feature, kernel or both")
      ->check(CLI::IsMember({"feature", "kernel", "both"}));
  bench->add_option("--out", bench_args.out, "CSV output path");
  bench->add_flag("--force", bench_args.force, "Allow kernel sizes above the cap");
  bench->add_option("--max-frames", bench_args.max_frames, "Kernel materialization cap");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (select->parsed()) return cmd_select(select_args, out);
    if (oracle->parsed()) return cmd_oracle_check(oracle_args, out);
    return cmd_bench(bench_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace lddr::cli
