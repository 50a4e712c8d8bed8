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

#include "rkreach/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "rkreach/errors.hpp"
#include "rkreach/sample_io.hpp"

namespace rkreach {
namespace {

const std::set<std::string> kKnownKeys{
    "system",      "dim",          "sampling_time", "disturbance",   "variance",     "beta_alpha",
    "beta_beta",   "beta_centered", "cwh_altitude", "cwh_mass",      "policy",       "sigma",
    "lambda",      "eta_mode",     "eta",           "horizon",       "samples",      "seed",
    "grid",        "safe_box",     "target_box",    "sample_box",    "sample_steps", "mode",
    "controls",    "dp_grid",      "dp_nodes",      "rollouts",      "bench_dims",   "bench_reps",
    "samples_file", "output_file"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const std::string t = trim(text);
  const char* begin = t.data() + (!t.empty() && t[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

// One group per axis, or a single group broadcast to every axis.
std::vector<std::string> axis_groups(const std::string& key, const std::string& text, Index dim) {
  auto groups = split(text, ';');
  if (groups.size() == 1) return std::vector<std::string>(static_cast<std::size_t>(dim), groups[0]);
  if (static_cast<Index>(groups.size()) != dim) {
    throw ConfigError(key + ": expected 1 or " + std::to_string(dim) + " axis entries, got " +
                      std::to_string(groups.size()));
  }
  return groups;
}

}  // namespace

std::vector<GridAxis> parse_grid(const std::string& text, Index dim) {
  std::vector<GridAxis> axes;
  for (const auto& group : axis_groups("grid", text, dim)) {
    const auto parts = split(group, ':');
    if (parts.size() != 3) throw ConfigError("grid: expected lo:hi:count, got '" + group + "'");
    GridAxis axis{to_double("grid", parts[0]), to_double("grid", parts[1]),
                  static_cast<Index>(to_integer("grid", parts[2]))};
    if (axis.count < 1) throw ConfigError("grid: evaluation grid is empty");
    if (axis.lower > axis.upper) throw ConfigError("grid: lower bound exceeds upper bound");
    if (axis.count > 1 && axis.lower == axis.upper) throw ConfigError("grid: repeated nodes on a zero-width axis");
    axes.push_back(axis);
  }
  return axes;
}

Box parse_box(const std::string& text, Index dim) {
  Box box{Vector(dim), Vector(dim)};
  Index i = 0;
  for (const auto& group : axis_groups("box", text, dim)) {
    const auto parts = split(group, ':');
    if (parts.size() != 2) throw ConfigError("box: expected lo:hi, got '" + group + "'");
    box.lower[i] = to_double("box", parts[0]);
    box.upper[i] = to_double("box", parts[1]);
    if (box.lower[i] > box.upper[i]) throw ConfigError("box: lower bound exceeds upper bound");
    ++i;
  }
  return box;
}

Matrix parse_controls(const std::string& text) {
  const auto rows = split(text, ';');
  Matrix controls;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto parts = split(rows[r], ',');
    if (r == 0) controls.resize(static_cast<Index>(rows.size()), static_cast<Index>(parts.size()));
    if (static_cast<Index>(parts.size()) != controls.cols()) {
      throw ConfigError("controls: every control needs " + std::to_string(controls.cols()) + " components");
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
      controls(static_cast<Index>(r), static_cast<Index>(j)) = to_double("controls", parts[j]);
    }
  }
  return controls;
}

ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries entries;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!kKnownKeys.count(key)) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    entries[key] = trim(line.substr(eq + 1));
  }
  return entries;
}

ConfigEntries load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path.string());
  return parse_config_text(read_file(path));
}

RunConfig resolve_config(const ConfigEntries& entries) {
  for (const auto& [key, value] : entries) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  RunConfig c;
  if (const auto* v = get("system")) c.system = *v;
  if (c.system != "integrator" && c.system != "cwh") {
    throw ConfigError("system: expected integrator or cwh, got '" + c.system + "'");
  }
  const bool cwh = c.system == "cwh";

  // System-dependent defaults.
  if (cwh) {
    c.dim = 4;
    c.sampling_time = c.cwh.sampling_time_s;
    c.policy = "docking";
    c.sigma = 0.05;
    c.horizon = 5;
    c.samples = 900;
  }

  if (const auto* v = get("dim")) {
    c.dim = static_cast<Index>(to_integer("dim", *v));
    if (cwh && c.dim != 4) throw ConfigError("dim: the cwh system is 4-dimensional");
  }
  if (c.dim < 1) throw ConfigError("dim must be at least 1");
  if (const auto* v = get("sampling_time")) c.sampling_time = to_double("sampling_time", *v);
  if (const auto* v = get("disturbance")) c.disturbance = *v;
  if (const auto* v = get("variance")) c.variance = to_double("variance", *v);
  if (const auto* v = get("beta_alpha")) c.beta_alpha = to_double("beta_alpha", *v);
  if (const auto* v = get("beta_beta")) c.beta_beta = to_double("beta_beta", *v);
  if (const auto* v = get("beta_centered")) c.beta_centered = to_bool("beta_centered", *v);
  if (const auto* v = get("cwh_altitude")) c.cwh.altitude_km = to_double("cwh_altitude", *v);
  if (const auto* v = get("cwh_mass")) c.cwh.mass_kg = to_double("cwh_mass", *v);
  c.cwh.sampling_time_s = c.sampling_time;
  if (const auto* v = get("policy")) c.policy = *v;
  if (const auto* v = get("sigma")) c.sigma = to_double("sigma", *v);
  if (const auto* v = get("lambda")) c.lambda = to_double("lambda", *v);
  if (const auto* v = get("eta_mode")) {
    if (*v == "normalized") c.eta_mode = EtaMode::Normalized;
    else if (*v == "fixed") c.eta_mode = EtaMode::Fixed;
    else throw ConfigError("eta_mode: expected normalized or fixed, got '" + *v + "'");
  }
  if (const auto* v = get("eta")) c.eta = to_double("eta", *v);
  if (const auto* v = get("horizon")) c.horizon = static_cast<int>(to_integer("horizon", *v));
  if (const auto* v = get("samples")) c.samples = static_cast<Index>(to_integer("samples", *v));
  if (const auto* v = get("seed")) {
    const long long s = to_integer("seed", *v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  const std::string default_grid = cwh ? "-0.15:0.15:5;-0.4:-0.1:5;0:0:1;0:0:1" : "-1.1:1.1:101";
  c.grid = parse_grid(get("grid") ? *get("grid") : default_grid, c.dim);
  if (cwh && (get("safe_box") || get("target_box"))) {
    throw ConfigError("safe_box/target_box apply to the integrator; the cwh sets are fixed");
  }
  c.safe_box = parse_box(get("safe_box") ? *get("safe_box") : "-1:1", c.dim);
  c.target_box = parse_box(get("target_box") ? *get("target_box") : "-1:1", c.dim);

  if (const auto* v = get("sample_box")) {
    c.sample_box = parse_box(*v, c.dim);
  } else if (cwh) {
    c.sample_box = parse_box("-0.3:0.3;-0.5:0.1;0:0;0:0", c.dim);
  } else {
    Box grid_box{Vector(c.dim), Vector(c.dim)};
    for (Index i = 0; i < c.dim; ++i) {
      grid_box.lower[i] = c.grid[static_cast<std::size_t>(i)].lower;
      grid_box.upper[i] = c.grid[static_cast<std::size_t>(i)].upper;
    }
    c.sample_box = grid_box.inflated(0.1);
  }
  c.sample_steps = cwh ? c.horizon - 1 : 0;
  if (const auto* v = get("sample_steps")) c.sample_steps = static_cast<int>(to_integer("sample_steps", *v));

  if (const auto* v = get("mode")) {
    if (*v == "fixed") c.mode = RecursionMode::Fixed;
    else if (*v == "max") c.mode = RecursionMode::Max;
    else throw ConfigError("mode: expected fixed or max, got '" + *v + "'");
  }
  if (const auto* v = get("controls")) c.controls = parse_controls(*v);

  if (const auto* v = get("dp_grid")) c.dp_grid = static_cast<Index>(to_integer("dp_grid", *v));
  if (const auto* v = get("dp_nodes")) c.dp_nodes = static_cast<int>(to_integer("dp_nodes", *v));
  if (const auto* v = get("rollouts")) c.rollouts = to_integer("rollouts", *v);
  if (const auto* v = get("bench_dims")) {
    c.bench_dims.clear();
    for (const auto& part : split(*v, ',')) c.bench_dims.push_back(static_cast<Index>(to_integer("bench_dims", part)));
  }
  if (const auto* v = get("bench_reps")) c.bench_reps = static_cast<int>(to_integer("bench_reps", *v));
  if (const auto* v = get("samples_file")) c.samples_file = *v;
  if (const auto* v = get("output_file")) c.output_file = *v;

  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (samples < 1) throw ConfigError("samples must be at least 1");
  if (!(sampling_time > 0.0)) throw ConfigError("sampling_time must be positive");
  if (disturbance != "gaussian" && disturbance != "beta" && disturbance != "none") {
    throw ConfigError("disturbance: expected gaussian, beta or none, got '" + disturbance + "'");
  }
  if (system == "cwh" && disturbance == "beta") throw ConfigError("the cwh system uses its Gaussian disturbance");
  if (!(variance > 0.0)) throw ConfigError("variance must be positive");
  if (!(beta_alpha > 0.0) || !(beta_beta > 0.0)) throw ConfigError("Beta shape parameters must be positive");
  if (!(cwh.mass_kg > 0.0)) throw ConfigError("cwh_mass must be positive");
  if (!(cwh.altitude_km > 0.0)) throw ConfigError("cwh_altitude must be positive");
  if (policy != "zero" && policy != "docking") throw ConfigError("policy: expected zero or docking");
  if (policy == "docking" && system != "cwh") throw ConfigError("policy docking requires the cwh system");
  if (eta_mode == EtaMode::Fixed && !(eta > 0.0)) throw ConfigError("eta must be positive");
  if (static_cast<Index>(grid.size()) != dim) throw ConfigError("grid dimension does not match dim");
  if (sample_steps < 0) throw ConfigError("sample_steps must be non-negative");
  if (mode == RecursionMode::Max) {
    if (controls.rows() < 1) throw ConfigError("mode max requires a controls grid");
    const Index m = system == "cwh" ? 2 : 1;
    if (controls.cols() != m) throw ConfigError("controls need " + std::to_string(m) + " components each");
  }
  if (dp_grid < 2) throw ConfigError("dp_grid must be at least 2");
  if (dp_nodes < 1) throw ConfigError("dp_nodes must be at least 1");
  if (rollouts < 1) throw ConfigError("rollouts must be at least 1");
  if (bench_dims.empty()) throw ConfigError("bench_dims is empty");
  for (const Index n : bench_dims) {
    if (n < 1) throw ConfigError("bench_dims entries must be at least 1");
  }
  if (bench_reps < 1) throw ConfigError("bench_reps must be at least 1");
}

std::unique_ptr<StochasticSystem> make_system(const RunConfig& config) {
  if (config.system == "cwh") {
    if (config.disturbance == "none") {
      throw ConfigError("the cwh system always carries its Gaussian disturbance");
    }
    return std::make_unique<CwhSystem>(config.cwh);
  }
  DisturbanceSpec disturbance = NoDisturbance{};
  if (config.disturbance == "gaussian") disturbance = GaussianIid{Vector::Constant(1, config.variance)};
  if (config.disturbance == "beta") disturbance = BetaIid{config.beta_alpha, config.beta_beta, config.beta_centered};
  return std::make_unique<IntegratorChain>(config.dim, config.sampling_time, disturbance);
}

FixedPolicy make_policy(const RunConfig& config, const StochasticSystem& system) {
  if (config.policy == "docking") return cwh_docking_policy(dynamic_cast<const CwhSystem&>(system));
  FixedPolicy zero = constant_policy(Vector::Zero(system.control_dim()));
  zero.description = "zero";
  return zero;
}

ReachSpec make_reach_spec(const RunConfig& config, const StochasticSystem& system) {
  ReachSpec spec;
  spec.horizon = config.horizon;
  if (config.system == "cwh") {
    const CwhSets sets = cwh_sets();
    spec.safe = sets.safe;
    spec.target = sets.target;
  } else {
    spec.safe = box_predicate(config.safe_box);
    spec.target = box_predicate(config.target_box);
  }
  if (config.mode == RecursionMode::Max) {
    spec.policy = ControlGrid{config.controls, system.control_bounds()};
  } else {
    spec.policy = make_policy(config, system);
  }
  return spec;
}

StateSampler make_sampler(const RunConfig& config, const StochasticSystem& system) {
  StateSampler initial = uniform_box_sampler(config.sample_box);
  if (config.sample_steps == 0) return initial;
  return closed_loop_sampler(system, make_policy(config, system), std::move(initial), config.sample_steps);
}

EmbeddingOptions make_embedding_options(const RunConfig& config) {
  EmbeddingOptions options;
  options.kernel = KernelSpec(config.sigma);
  options.lambda = config.lambda;
  options.eta_mode = config.eta_mode;
  options.eta = config.eta;
  return options;
}

Matrix evaluation_points(const RunConfig& config) { return grid_points(config.grid); }

DPGrid make_dp_grid(const RunConfig& config) {
  DPGrid grid;
  for (const auto& axis : config.grid) grid.axes.push_back({axis.lower, axis.upper, config.dp_grid});
  grid.quadrature_nodes = config.dp_nodes;
  for (const Box* box : {&config.safe_box, &config.target_box}) {
    if (box->dim() == grid.dim()) grid.add_breakpoints(*box);
  }
  grid.validate();
  return grid;
}

}  // namespace rkreach
