/*******************************************************************************
* Copyright 2026 The rkreach Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*******************************************************************************/

#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "rkreach/config.hpp"
#include "rkreach/reach.hpp"
#include "rkreach/sample_io.hpp"

namespace rkreach {

/// x1..xn, V0..VN and, when maximizing, the step-0 control u1..um per point.
ResultTable value_table(const ValueField& field, const Matrix* controls = nullptr);

/// Absolute V0 errors between two tables over the same point set.
struct ErrorSummary {
  Vector abs_error;
  std::vector<bool> interior;
  double max = 0.0;
  double mean = 0.0;
  /// Max over points strictly inside the safe set, so boundary rounding is excluded.
  double interior_max = 0.0;
  Index interior_count = 0;
};

/// A point is interior when it and its tiny per-axis perturbations are all safe.
bool strictly_inside(const StatePredicate& safe, std::span<const double> x);

ErrorSummary compare_values(const Matrix& points, const Vector& estimate, const Vector& reference,
                            const StatePredicate& safe);

struct ReachTiming {
  double fit_seconds = 0.0;
  double recursion_seconds = 0.0;
};

/// Fit plus recursion for the configured mode on the given samples.
ValueField run_pipeline(const RunConfig& config, const StochasticSystem& system, SampleSet samples,
                        const Matrix& points, ReachTiming* timing = nullptr);

struct BenchRow {
  Index dim = 0;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
};

/// Single-point reach timings (fit plus recursion, sample generation excluded)
/// for each configured integrator dimension; median over bench_reps runs.
std::vector<BenchRow> bench_dims(const RunConfig& config);

// CLI subcommands. Each writes config.output_file atomically when set and
// reports on `out`; `summary` switches the report to key=value lines.
void cmd_generate(const RunConfig& config, std::ostream& out, bool summary);
void cmd_reach(const RunConfig& config, std::ostream& out, bool summary);
void cmd_oracle_dp(const RunConfig& config, std::ostream& out, bool summary);
void cmd_oracle_mc(const RunConfig& config, std::ostream& out, bool summary);
void cmd_compare(const RunConfig& config, const std::filesystem::path& estimate,
                 const std::filesystem::path& reference, std::ostream& out, bool summary);
void cmd_bench_dims(const RunConfig& config, std::ostream& out, bool summary);

}  // namespace rkreach
