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

#include "rkreach/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rkreach/errors.hpp"
#include "rkreach/parallel.hpp"

namespace rkreach {
namespace {

constexpr std::int64_t kRolloutBlock = 4096;

Vector axis_variances(const StochasticSystem& system) {
  const auto* gaussian = std::get_if<GaussianIid>(&system.disturbance());
  if (gaussian == nullptr) {
    throw ContractError("the DP oracle needs a Gaussian disturbance; use the Monte Carlo oracle instead");
  }
  return gaussian->variance.size() == 1 ? Vector::Constant(2, gaussian->variance[0]) : Vector(gaussian->variance);
}

/// E[f(mean + w)] with a per-axis rule split at the grid breakpoints.
double tensor_expectation(const DPGrid& grid, const Vector& variances, const double mean[2],
                          const std::function<double(std::span<const double>)>& f) {
  std::array<QuadratureRule, 2> rules;
  std::vector<double> cuts;
  for (std::size_t a = 0; a < 2; ++a) {
    cuts.clear();
    if (a < grid.breakpoints.size()) {
      for (const double b : grid.breakpoints[a]) cuts.push_back(b - mean[a]);
    }
    rules[a] = composite_gaussian_rule(variances[static_cast<Index>(a)], grid.quadrature_nodes, grid.truncation, cuts);
  }
  double acc = 0.0;
  double y[2];
  for (Index i = 0; i < rules[0].size(); ++i) {
    y[0] = mean[0] + rules[0].nodes[i];
    double row = 0.0;
    for (Index j = 0; j < rules[1].size(); ++j) {
      y[1] = mean[1] + rules[1].nodes[j];
      row += rules[1].weights[j] * f({y, 2});
    }
    acc += rules[0].weights[i] * row;
  }
  return acc;
}

const FixedPolicy& require_fixed(const ReachSpec& spec, const StochasticSystem& system) {
  const auto* policy = std::get_if<FixedPolicy>(&spec.policy);
  if (policy == nullptr) throw ContractError("the oracles evaluate a fixed policy");
  if (policy->control_dim != system.control_dim()) {
    throw InputError("policy control dimension does not match the system");
  }
  return *policy;
}

}  // namespace

Index DPGrid::size() const {
  Index n = 1;
  for (const auto& axis : axes) n *= axis.count;
  return n;
}

DPGrid DPGrid::uniform(const Box& box, Index count_per_axis, int quadrature_nodes) {
  DPGrid grid;
  for (Index i = 0; i < box.dim(); ++i) grid.axes.push_back({box.lower[i], box.upper[i], count_per_axis});
  grid.quadrature_nodes = quadrature_nodes;
  grid.validate();
  return grid;
}

void DPGrid::add_breakpoints(const Box& box) {
  if (box.dim() != dim()) throw InputError("breakpoint box dimension does not match the DP grid");
  breakpoints.resize(axes.size());
  for (Index i = 0; i < box.dim(); ++i) {
    auto& axis = breakpoints[static_cast<std::size_t>(i)];
    axis.push_back(box.lower[i]);
    axis.push_back(box.upper[i]);
  }
}

void DPGrid::validate() const {
  if (axes.empty()) throw InputError("DP grid has no axes");
  for (const auto& axis : axes) {
    if (axis.count < 2) throw InputError("DP grid axes need at least two nodes");
    if (!(axis.lower < axis.upper)) throw InputError("DP grid axis bounds are inverted");
  }
  if (quadrature_nodes < 1) throw InputError("DP quadrature needs at least one node");
}

Matrix grid_points(const std::vector<GridAxis>& axes) {
  if (axes.empty()) throw InputError("evaluation grid has no axes");
  Index total = 1;
  for (const auto& axis : axes) {
    if (axis.count < 1) throw InputError("evaluation grid axis is empty");
    total *= axis.count;
  }
  const auto dim = static_cast<Index>(axes.size());
  Matrix points(total, dim);
  for (Index p = 0; p < total; ++p) {
    Index rest = p;
    for (Index d = dim - 1; d >= 0; --d) {
      const auto& axis = axes[static_cast<std::size_t>(d)];
      points(p, d) = axis.node(rest % axis.count);
      rest /= axis.count;
    }
  }
  return points;
}

Matrix DPGrid::points() const { return grid_points(axes); }

double interpolate_2d(const DPGrid& grid, std::span<const double> node_values, std::span<const double> x) {
  const GridAxis& ax = grid.axes[0];
  const GridAxis& ay = grid.axes[1];
  if (!(x[0] >= ax.lower && x[0] <= ax.upper && x[1] >= ay.lower && x[1] <= ay.upper)) return 0.0;
  const double fx = (x[0] - ax.lower) / ax.spacing();
  const double fy = (x[1] - ay.lower) / ay.spacing();
  const Index i = std::min<Index>(static_cast<Index>(fx), ax.count - 2);
  const Index j = std::min<Index>(static_cast<Index>(fy), ay.count - 2);
  const double tx = fx - static_cast<double>(i);
  const double ty = fy - static_cast<double>(j);
  const auto at = [&](Index a, Index b) { return node_values[static_cast<std::size_t>(a * ay.count + b)]; };
  return (1.0 - tx) * ((1.0 - ty) * at(i, j) + ty * at(i, j + 1)) +
         tx * ((1.0 - ty) * at(i + 1, j) + ty * at(i + 1, j + 1));
}

DpSolution::DpSolution(DPGrid grid, ReachSpec spec, NodeValues continuation)
    : grid_(std::move(grid)), spec_(std::move(spec)), continuation_(std::move(continuation)) {}

double DpSolution::value(int k, std::span<const double> x) const {
  if (k < 0 || k > spec_.horizon) throw InputError("DP value requested outside 0..N");
  if (static_cast<Index>(x.size()) != grid_.dim()) throw InputError("DP value: dimension mismatch");
  if (k == spec_.horizon) return exact::terminal_value(spec_, x);
  if (!spec_.safe(x)) return 0.0;
  const double w = interpolate_2d(grid_, {continuation_.row(k).data(), static_cast<std::size_t>(grid_.size())}, x);
  return exact::backup(spec_, x, std::clamp(w, 0.0, 1.0));
}

ValueField DpSolution::evaluate(const Matrix& points) const {
  ValueField field;
  field.points = points;
  field.values.resize(spec_.horizon + 1, points.rows());
  parallel_for(static_cast<std::size_t>(points.rows()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto row = row_span(points, static_cast<Index>(p));
      for (int k = 0; k <= spec_.horizon; ++k) field.values(k, static_cast<Index>(p)) = value(k, row);
    }
  });
  return field;
}

DpSolution dp_value(const StochasticSystem& system, const ReachSpec& spec, const DPGrid& grid) {
  spec.validate();
  grid.validate();
  if (system.state_dim() != 2 || grid.dim() != 2) {
    throw ContractError("the DP oracle supports two-dimensional systems only");
  }
  const FixedPolicy& policy = require_fixed(spec, system);
  const Vector variances = axis_variances(system);
  const Matrix nodes = grid.points();
  const Index n_nodes = nodes.rows();

  // Row-major so each row is one contiguous node-value array.
  DpSolution::NodeValues w(spec.horizon, n_nodes);
  for (int k = spec.horizon - 1; k >= 0; --k) {
    const bool last = k + 1 == spec.horizon;
    const std::span<const double> next_row =
        last ? std::span<const double>{} : std::span<const double>{w.row(k + 1).data(), static_cast<std::size_t>(n_nodes)};
    const std::function<double(std::span<const double>)> next_value = [&](std::span<const double> y) {
      if (last) return exact::terminal_value(spec, y);
      if (!spec.safe(y)) return 0.0;
      return std::clamp(interpolate_2d(grid, next_row, y), 0.0, 1.0);
    };
    parallel_for(static_cast<std::size_t>(n_nodes), [&](std::size_t begin, std::size_t end) {
      std::vector<double> u(static_cast<std::size_t>(policy.control_dim));
      double mean[2];
      for (std::size_t g = begin; g < end; ++g) {
        const auto x = row_span(nodes, static_cast<Index>(g));
        policy.map(k, x, u);
        system.drift(x, u, {mean, 2});
        w(k, static_cast<Index>(g)) = tensor_expectation(grid, variances, mean, next_value);
      }
    });
  }
  return DpSolution(grid, spec, std::move(w));
}

double dp_expectation(const StochasticSystem& system, const DPGrid& grid, std::span<const double> x,
                      std::span<const double> u, const std::function<double(std::span<const double>)>& f) {
  if (system.state_dim() != 2) throw ContractError("the DP oracle supports two-dimensional systems only");
  const Vector variances = axis_variances(system);
  double mean[2];
  system.drift(x, u, {mean, 2});
  return tensor_expectation(grid, variances, mean, f);
}

McEstimate mc_value(const StochasticSystem& system, const ReachSpec& spec, std::span<const double> x0,
                    std::int64_t rollouts, std::uint64_t seed) {
  spec.validate();
  if (rollouts < 1) throw InputError("Monte Carlo oracle needs at least one rollout");
  if (static_cast<Index>(x0.size()) != system.state_dim()) {
    throw InputError("Monte Carlo initial state has dimension " + std::to_string(x0.size()) +
                     ", system has " + std::to_string(system.state_dim()));
  }
  const FixedPolicy& policy = require_fixed(spec, system);

  const std::int64_t n_blocks = (rollouts + kRolloutBlock - 1) / kRolloutBlock;
  std::vector<std::int64_t> block_hits(static_cast<std::size_t>(n_blocks), 0);
  parallel_for(static_cast<std::size_t>(n_blocks), [&](std::size_t begin, std::size_t end) {
    const auto n = x0.size();
    std::vector<double> x(n), next(n), u(static_cast<std::size_t>(policy.control_dim));
    for (std::size_t b = begin; b < end; ++b) {
      Rng rng = Rng::stream(seed, b);
      const std::int64_t first = static_cast<std::int64_t>(b) * kRolloutBlock;
      const std::int64_t count = std::min(kRolloutBlock, rollouts - first);
      std::int64_t hits = 0;
      for (std::int64_t r = 0; r < count; ++r) {
        std::copy(x0.begin(), x0.end(), x.begin());
        bool alive = true;
        for (int k = 0; k < spec.horizon && alive; ++k) {
          if (!spec.safe(x)) {
            alive = false;
            break;
          }
          policy.map(k, x, u);
          system.step(x, u, rng, next);
          x.swap(next);
        }
        if (alive && spec.target(x)) ++hits;
      }
      block_hits[b] = hits;
    }
  }, 1);

  McEstimate est;
  est.rollouts = rollouts;
  for (const auto h : block_hits) est.hits += h;
  est.probability = static_cast<double>(est.hits) / static_cast<double>(rollouts);
  est.half_width = 1.96 * std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(rollouts));
  return est;
}

}  // namespace rkreach
