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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rkreach/embedding.hpp"
#include "rkreach/oracle.hpp"
#include "rkreach/reach.hpp"
#include "rkreach/systems.hpp"

namespace rkreach {

enum class RecursionMode { Fixed, Max };

/// Fully resolved run configuration. Built from flat key=value text plus
/// overrides; keys left unset take system-dependent defaults.
struct RunConfig {
  std::string system = "integrator";  // integrator | cwh
  Index dim = 2;
  double sampling_time = 0.25;
  std::string disturbance = "gaussian";  // gaussian | beta | none
  double variance = 0.01;
  double beta_alpha = 0.5;
  double beta_beta = 0.5;
  bool beta_centered = false;
  CwhParameters cwh;
  std::string policy = "zero";  // zero | docking

  double sigma = 0.1;
  double lambda = 1.0;
  EtaMode eta_mode = EtaMode::Normalized;
  double eta = 1.0;

  int horizon = 3;
  Index samples = 1024;
  std::uint64_t seed = 0;

  std::vector<GridAxis> grid;
  Box safe_box;    // integrator only
  Box target_box;  // integrator only
  Box sample_box;
  int sample_steps = 0;

  RecursionMode mode = RecursionMode::Fixed;
  Matrix controls;  // max mode grid, one control per row

  Index dp_grid = 221;
  int dp_nodes = 20;
  std::int64_t rollouts = 100000;

  std::vector<Index> bench_dims{100, 1000};
  int bench_reps = 3;

  std::filesystem::path samples_file;
  std::filesystem::path output_file;

  /// Throws ConfigError unless sigma > 0, lambda > 0, N >= 1, M >= 1 and the
  /// remaining fields are consistent.
  void validate() const;
};

using ConfigEntries = std::map<std::string, std::string>;

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError.
ConfigEntries parse_config_text(const std::string& text);
ConfigEntries load_config_file(const std::filesystem::path& path);

/// Applies defaults for the chosen system and validates. Unknown keys and
/// malformed values throw ConfigError.
RunConfig resolve_config(const ConfigEntries& entries);

/// "lo:hi:count" for every axis, or one such triple per axis separated by ';'.
std::vector<GridAxis> parse_grid(const std::string& text, Index dim);
/// "lo:hi" for every axis, or one pair per axis separated by ';'.
Box parse_box(const std::string& text, Index dim);
/// Controls separated by ';', components by ','.
Matrix parse_controls(const std::string& text);

std::unique_ptr<StochasticSystem> make_system(const RunConfig& config);
FixedPolicy make_policy(const RunConfig& config, const StochasticSystem& system);
ReachSpec make_reach_spec(const RunConfig& config, const StochasticSystem& system);
StateSampler make_sampler(const RunConfig& config, const StochasticSystem& system);
EmbeddingOptions make_embedding_options(const RunConfig& config);
Matrix evaluation_points(const RunConfig& config);
DPGrid make_dp_grid(const RunConfig& config);

}  // namespace rkreach
