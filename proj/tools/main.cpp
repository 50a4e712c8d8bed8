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

// rkreach command-line entry point.
//
//   rkreach generate   [config] --out samples.csv
//   rkreach reach      [config] --samples-file samples.csv --out values.csv
//   rkreach oracle-dp  [config] --out dp.csv
//   rkreach oracle-mc  [config] --out mc.csv
//   rkreach compare    [config] --estimate values.csv --reference dp.csv
//   rkreach bench-dims [config]
//
// Exit codes: 0 success, 2 configuration or validation error, 3 numerical
// error, 4 IO error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rkreach/commands.hpp"
#include "rkreach/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::string> sigma, lambda, horizon, samples, seed, grid, mode, out, samples_file;
  bool summary = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_file, "key=value configuration file");
  cmd->add_option("--set", args.sets, "extra key=value override (repeatable)");
  cmd->add_option("--sigma", args.sigma, "kernel bandwidth");
  cmd->add_option("--lambda", args.lambda, "regularization");
  cmd->add_option("--horizon", args.horizon, "time horizon N");
  cmd->add_option("--samples", args.samples, "sample count M");
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--grid", args.grid, "evaluation grid lo:hi:count[;...]");
  cmd->add_option("--mode", args.mode, "fixed | max");
  cmd->add_option("--out", args.out, "output CSV path");
  cmd->add_option("--samples-file", args.samples_file, "sample CSV path");
  cmd->add_flag("--summary", args.summary, "print key=value results for scripting");
}

rkreach::RunConfig build_config(const CommonArgs& args) {
  rkreach::ConfigEntries entries;
  if (!args.config_file.empty()) entries = rkreach::load_config_file(args.config_file);
  const auto put = [&](const char* key, const std::optional<std::string>& value) {
    if (value) entries[key] = *value;
  };
  put("sigma", args.sigma);
  put("lambda", args.lambda);
  put("horizon", args.horizon);
  put("samples", args.samples);
  put("seed", args.seed);
  put("grid", args.grid);
  put("mode", args.mode);
  put("output_file", args.out);
  put("samples_file", args.samples_file);
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw rkreach::ConfigError("--set expects key=value, got '" + kv + "'");
    const auto parsed = rkreach::parse_config_text(kv);
    for (const auto& [key, value] : parsed) entries[key] = value;
  }
  return rkreach::resolve_config(entries);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-embedding stochastic reachability"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string estimate, reference;
  auto* generate = app.add_subcommand("generate", "simulate transitions and write a sample CSV");
  auto* reach = app.add_subcommand("reach", "estimate safety probabilities from a sample CSV");
  auto* oracle_dp = app.add_subcommand("oracle-dp", "grid dynamic programming reference (2-D Gaussian)");
  auto* oracle_mc = app.add_subcommand("oracle-mc", "Monte Carlo reference at the evaluation points");
  auto* compare = app.add_subcommand("compare", "absolute V0 error between two result tables");
  auto* bench = app.add_subcommand("bench-dims", "single-point timing over integrator dimensions");
  for (auto* cmd : {generate, reach, oracle_dp, oracle_mc, compare, bench}) add_common(cmd, args);
  compare->add_option("--estimate", estimate, "estimated values CSV")->required();
  compare->add_option("--reference", reference, "reference values CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const rkreach::RunConfig config = build_config(args);
    if (generate->parsed()) rkreach::cmd_generate(config, std::cout, args.summary);
    else if (reach->parsed()) rkreach::cmd_reach(config, std::cout, args.summary);
    else if (oracle_dp->parsed()) rkreach::cmd_oracle_dp(config, std::cout, args.summary);
    else if (oracle_mc->parsed()) rkreach::cmd_oracle_mc(config, std::cout, args.summary);
    else if (compare->parsed()) rkreach::cmd_compare(config, estimate, reference, std::cout, args.summary);
    else if (bench->parsed()) rkreach::cmd_bench_dims(config, std::cout, args.summary);
  } catch (const rkreach::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const rkreach::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::logic_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
