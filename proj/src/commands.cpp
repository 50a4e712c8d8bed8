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

#include "rkreach/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "rkreach/errors.hpp"
#include "rkreach/oracle.hpp"
#include "rkreach/parallel.hpp"

namespace rkreach {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> point_columns(Index n) {
  std::vector<std::string> cols;
  for (Index i = 1; i <= n; ++i) cols.push_back("x" + std::to_string(i));
  return cols;
}

void write_output(const RunConfig& config, const ResultTable& table) {
  if (!config.output_file.empty()) write_table(config.output_file, table);
}

std::uint64_t point_seed(std::uint64_t seed, Index p) {
  return seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(p + 1));
}

void check_sample_schema(const RunConfig& config, const StochasticSystem& system, const SampleSet& samples) {
  if (samples.state_dim() != system.state_dim() || samples.control_dim() != system.control_dim()) {
    throw InputError("sample file has n=" + std::to_string(samples.state_dim()) + ", m=" +
                     std::to_string(samples.control_dim()) + " but the " + config.system + " config expects n=" +
                     std::to_string(system.state_dim()) + ", m=" + std::to_string(system.control_dim()));
  }
}

}  // namespace

ResultTable value_table(const ValueField& field, const Matrix* controls) {
  const Index n = field.points.cols();
  const Index n_values = field.values.rows();
  const bool with_controls = controls != nullptr && field.policy_choices.size() > 0;
  const Index m = with_controls ? controls->cols() : 0;

  ResultTable table;
  table.columns = point_columns(n);
  for (Index k = 0; k < n_values; ++k) table.columns.push_back("V" + std::to_string(k));
  for (Index j = 1; j <= m; ++j) table.columns.push_back("u" + std::to_string(j));
  table.rows.resize(field.points.rows(), n + n_values + m);
  for (Index p = 0; p < field.points.rows(); ++p) {
    for (Index i = 0; i < n; ++i) table.rows(p, i) = field.points(p, i);
    for (Index k = 0; k < n_values; ++k) table.rows(p, n + k) = field.values(k, p);
    if (with_controls) {
      const Index g = field.policy_choices(0, p);
      for (Index j = 0; j < m; ++j) table.rows(p, n + n_values + j) = (*controls)(g, j);
    }
  }
  return table;
}

bool strictly_inside(const StatePredicate& safe, std::span<const double> x) {
  if (!safe(x)) return false;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = 1e-9 * std::max(1.0, std::abs(x[i]));
    for (const double sign : {-1.0, 1.0}) {
      probe[i] = x[i] + sign * delta;
      if (!safe(probe)) return false;
    }
    probe[i] = x[i];
  }
  return true;
}

ErrorSummary compare_values(const Matrix& points, const Vector& estimate, const Vector& reference,
                            const StatePredicate& safe) {
  if (estimate.size() != points.rows() || reference.size() != points.rows()) {
    throw InputError("compare: value vectors do not match the point set");
  }
  if (points.rows() == 0) throw InputError("compare: empty point set");
  ErrorSummary s;
  s.abs_error = (estimate - reference).cwiseAbs();
  s.interior.resize(static_cast<std::size_t>(points.rows()));
  s.max = s.abs_error.maxCoeff();
  s.mean = s.abs_error.mean();
  for (Index p = 0; p < points.rows(); ++p) {
    const bool inside = strictly_inside(safe, row_span(points, p));
    s.interior[static_cast<std::size_t>(p)] = inside;
    if (inside) {
      ++s.interior_count;
      s.interior_max = std::max(s.interior_max, s.abs_error[p]);
    }
  }
  return s;
}

ValueField run_pipeline(const RunConfig& config, const StochasticSystem& system, SampleSet samples,
                        const Matrix& points, ReachTiming* timing) {
  check_sample_schema(config, system, samples);
  if (points.rows() < 1) throw InputError("evaluation grid is empty");
  const ReachSpec spec = make_reach_spec(config, system);

  auto start = Clock::now();
  const EmbeddingEstimator est = EmbeddingEstimator::fit(std::move(samples), make_embedding_options(config));
  const double fit_seconds = seconds_since(start);

  start = Clock::now();
  ValueField field = config.mode == RecursionMode::Max ? value_recursion_max(est, spec, points)
                                                       : value_recursion(est, spec, points);
  const double recursion_seconds = seconds_since(start);
  if (!field.values.allFinite()) throw NumericalError("value recursion produced non-finite values");
  if (timing != nullptr) *timing = {fit_seconds, recursion_seconds};
  return field;
}

std::vector<BenchRow> bench_dims(const RunConfig& config) {
  std::vector<BenchRow> rows;
  for (const Index n : config.bench_dims) {
    RunConfig c = config;
    c.system = "integrator";
    c.dim = n;
    c.mode = RecursionMode::Fixed;
    c.grid.assign(static_cast<std::size_t>(n), GridAxis{0.0, 0.0, 1});
    c.safe_box = Box::cube(n, -1.0, 1.0);
    c.target_box = Box::cube(n, -1.0, 1.0);
    c.sample_box = Box::cube(n, -1.1, 1.1);
    c.sample_steps = 0;
    const auto system = make_system(c);
    const SampleSet samples =
        generate_samples(*system, make_policy(c, *system), c.samples, make_sampler(c, *system), c.seed);
    const Matrix point = evaluation_points(c);

    std::vector<double> times;
    for (int r = 0; r < c.bench_reps; ++r) {
      ReachTiming timing;
      run_pipeline(c, *system, samples, point, &timing);
      times.push_back(timing.fit_seconds + timing.recursion_seconds);
    }
    std::sort(times.begin(), times.end());
    rows.push_back({n, times[times.size() / 2], times.front(), times.back()});
  }
  return rows;
}

void cmd_generate(const RunConfig& config, std::ostream& out, bool summary) {
  const auto system = make_system(config);
  const SampleSet samples = generate_samples(*system, make_policy(config, *system), config.samples,
                                             make_sampler(config, *system), config.seed);
  if (!config.output_file.empty()) write_samples(config.output_file, samples);
  if (summary) {
    out << "M=" << samples.size() << "\nn=" << samples.state_dim() << "\nm=" << samples.control_dim()
        << "\nseed=" << config.seed << '\n';
  } else {
    out << "generated M=" << samples.size() << " n=" << samples.state_dim() << " m=" << samples.control_dim()
        << " seed=" << config.seed;
    if (!config.output_file.empty()) out << " -> " << config.output_file.string();
    out << '\n';
  }
}

void cmd_reach(const RunConfig& config, std::ostream& out, bool summary) {
  if (config.samples_file.empty()) throw ConfigError("reach needs a samples file");
  if (!std::filesystem::exists(config.samples_file)) {
    throw IoError("samples file not found: " + config.samples_file.string());
  }
  const auto system = make_system(config);
  SampleSet samples = read_samples(config.samples_file);
  const Matrix points = evaluation_points(config);
  ReachTiming timing;
  const ValueField field = run_pipeline(config, *system, std::move(samples), points, &timing);
  write_output(config, value_table(field, config.mode == RecursionMode::Max ? &config.controls : nullptr));
  if (summary) {
    out << "points=" << points.rows() << "\nhorizon=" << config.horizon << "\nfit_seconds=" << timing.fit_seconds
        << "\nrecursion_seconds=" << timing.recursion_seconds << '\n';
  } else {
    out << "reach: " << points.rows() << " points, N=" << config.horizon << ", fit " << timing.fit_seconds
        << " s, recursion " << timing.recursion_seconds << " s\n";
  }
}

void cmd_oracle_dp(const RunConfig& config, std::ostream& out, bool summary) {
  const auto system = make_system(config);
  const ReachSpec spec = make_reach_spec(config, *system);
  if (!std::holds_alternative<FixedPolicy>(spec.policy)) throw ConfigError("oracle-dp evaluates mode fixed");
  const auto start = Clock::now();
  const DpSolution dp = dp_value(*system, spec, make_dp_grid(config));
  const ValueField field = dp.evaluate(evaluation_points(config));
  const double seconds = seconds_since(start);
  write_output(config, value_table(field));
  if (summary) {
    out << "points=" << field.points.rows() << "\ndp_seconds=" << seconds << '\n';
  } else {
    out << "oracle-dp: " << field.points.rows() << " points, " << config.dp_grid << "^2 grid, " << seconds << " s\n";
  }
}

void cmd_oracle_mc(const RunConfig& config, std::ostream& out, bool summary) {
  const auto system = make_system(config);
  const ReachSpec spec = make_reach_spec(config, *system);
  if (!std::holds_alternative<FixedPolicy>(spec.policy)) throw ConfigError("oracle-mc evaluates mode fixed");
  const Matrix points = evaluation_points(config);
  const auto start = Clock::now();
  ResultTable table;
  table.columns = point_columns(points.cols());
  table.columns.push_back("V0");
  table.columns.push_back("half_width");
  table.rows.resize(points.rows(), points.cols() + 2);
  double max_half_width = 0.0;
  for (Index p = 0; p < points.rows(); ++p) {
    const McEstimate est = mc_value(*system, spec, row_span(points, p), config.rollouts, point_seed(config.seed, p));
    table.rows.row(p).head(points.cols()) = points.row(p);
    table.rows(p, points.cols()) = est.probability;
    table.rows(p, points.cols() + 1) = est.half_width;
    max_half_width = std::max(max_half_width, est.half_width);
  }
  const double seconds = seconds_since(start);
  write_output(config, table);
  if (summary) {
    out << "points=" << points.rows() << "\nrollouts=" << config.rollouts << "\nmax_half_width=" << max_half_width
        << "\nmc_seconds=" << seconds << '\n';
  } else {
    out << "oracle-mc: " << points.rows() << " points x " << config.rollouts << " rollouts, max half-width "
        << max_half_width << ", " << seconds << " s\n";
  }
}

void cmd_compare(const RunConfig& config, const std::filesystem::path& estimate_path,
                 const std::filesystem::path& reference_path, std::ostream& out, bool summary) {
  const ResultTable estimate = read_table(estimate_path);
  const ResultTable reference = read_table(reference_path);
  const Matrix points = estimate.points();
  const Matrix ref_points = reference.points();
  if (points.rows() != ref_points.rows() || points.cols() != ref_points.cols() ||
      (points - ref_points).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, points.cwiseAbs().maxCoeff())) {
    throw InputError("compare: the two tables do not share the same point set");
  }
  const auto system = make_system(config);
  if (points.cols() != system.get()->state_dim()) throw InputError("compare: point dimension does not match the config");
  const ReachSpec spec = make_reach_spec(config, *system);
  const Vector est_v0 = estimate.rows.col(estimate.require_column("V0"));
  const Vector ref_v0 = reference.rows.col(reference.require_column("V0"));
  const ErrorSummary s = compare_values(points, est_v0, ref_v0, spec.safe);

  ResultTable table;
  table.columns = point_columns(points.cols());
  for (const char* name : {"estimate", "reference", "abs_error", "interior"}) table.columns.emplace_back(name);
  table.rows.resize(points.rows(), points.cols() + 4);
  for (Index p = 0; p < points.rows(); ++p) {
    table.rows.row(p).head(points.cols()) = points.row(p);
    table.rows(p, points.cols()) = est_v0[p];
    table.rows(p, points.cols() + 1) = ref_v0[p];
    table.rows(p, points.cols() + 2) = s.abs_error[p];
    table.rows(p, points.cols() + 3) = s.interior[static_cast<std::size_t>(p)] ? 1.0 : 0.0;
  }
  write_output(config, table);
  if (summary) {
    out << "max_error=" << s.max << "\nmean_error=" << s.mean << "\ninterior_max_error=" << s.interior_max
        << "\ninterior_points=" << s.interior_count << '\n';
  } else {
    out << "compare: max " << s.max << ", mean " << s.mean << ", interior max " << s.interior_max << " over "
        << s.interior_count << " interior points\n";
  }
}

void cmd_bench_dims(const RunConfig& config, std::ostream& out, bool summary) {
  const auto rows = bench_dims(config);
  ResultTable table;
  table.columns = {"n", "seconds", "min_seconds", "max_seconds"};
  table.rows.resize(static_cast<Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.rows.row(static_cast<Index>(i)) << static_cast<double>(rows[i].dim), rows[i].median_seconds,
        rows[i].min_seconds, rows[i].max_seconds;
  }
  write_output(config, table);
  if (summary) {
    for (const auto& r : rows) out << "seconds_n" << r.dim << '=' << r.median_seconds << '\n';
  } else {
    out << table_to_csv(table);
  }
}

}  // namespace rkreach
