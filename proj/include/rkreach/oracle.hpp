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
#include <span>
#include <vector>

#include "rkreach/reach.hpp"
#include "rkreach/systems.hpp"
#include "rkreach/types.hpp"

namespace rkreach {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  Vector nodes;
  Vector weights;

  Index size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (exact for polynomials of degree 2n - 1).
QuadratureRule gauss_legendre(int n);

/// Rule for E[f(w)], w ~ N(0, variance): Gauss-Legendre nodes on
/// [-truncation * sd, truncation * sd] weighted by the normal density and
/// renormalized so the weights sum to one.
QuadratureRule truncated_gaussian_rule(double variance, int n, double truncation = 4.0);

/// Composite version of truncated_gaussian_rule: the truncated interval is split
/// at every cut strictly inside it and each piece gets its own n-point rule.
/// Cuts are offsets from the mean; placing them at discontinuities of the
/// integrand restores the fast convergence of Gaussian quadrature.
QuadratureRule composite_gaussian_rule(double variance, int n, double truncation, std::span<const double> cuts);

/// Evenly spaced nodes lower, ..., upper.
struct GridAxis {
  double lower = 0.0;
  double upper = 0.0;
  Index count = 1;

  double spacing() const { return count > 1 ? (upper - lower) / static_cast<double>(count - 1) : 0.0; }
  double node(Index i) const { return count > 1 ? lower + spacing() * static_cast<double>(i) : lower; }
};

/// Tensor-product state grid plus the disturbance quadrature used by the DP oracle.
struct DPGrid {
  std::vector<GridAxis> axes;
  int quadrature_nodes = 20;
  double truncation = 4.0;
  /// Per-axis coordinates where the integrand may jump (set boundaries). The
  /// quadrature is split there.
  std::vector<std::vector<double>> breakpoints;

  static DPGrid uniform(const Box& box, Index count_per_axis, int quadrature_nodes = 20);

  /// Registers the faces of a box as quadrature breakpoints.
  void add_breakpoints(const Box& box);

  Index dim() const { return static_cast<Index>(axes.size()); }
  Index size() const;
  /// All nodes, row-major with the last axis varying fastest.
  Matrix points() const;
  void validate() const;
};

/// Regular grid points over a box, last axis fastest; used for evaluation sets.
Matrix grid_points(const std::vector<GridAxis>& axes);

/// Bilinear interpolation of node values on a 2-D grid; 0 outside the grid.
double interpolate_2d(const DPGrid& grid, std::span<const double> node_values, std::span<const double> x);

/// Result of the grid DP. For k < N the value is V_k(x) = 1_safe(x) W_k(x),
/// where W_k(g) = E[V_{k+1}(y)] is computed at the grid nodes by quadrature and
/// interpolated elsewhere. Set memberships are evaluated exactly, so the only
/// interpolated quantity is the smooth continuation W_k.
class DpSolution {
 public:
  using NodeValues = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DpSolution(DPGrid grid, ReachSpec spec, NodeValues continuation);

  int horizon() const { return spec_.horizon; }
  const DPGrid& grid() const { return grid_; }
  /// N x G; row k is W_k at the grid nodes.
  const NodeValues& continuation() const { return continuation_; }

  double value(int k, std::span<const double> x) const;
  /// (N + 1) x P values at the given points.
  ValueField evaluate(const Matrix& points) const;

 private:
  DPGrid grid_;
  ReachSpec spec_;
  NodeValues continuation_;
};

/// Grid dynamic programming for two-dimensional systems with Gaussian
/// disturbance under a fixed policy. Throws ContractError for other systems.
DpSolution dp_value(const StochasticSystem& system, const ReachSpec& spec, const DPGrid& grid);

/// One-step DP backup: W(x) = E[f(step(x, u))] for the same system and grid
/// quadrature, where f is an arbitrary continuation function.
double dp_expectation(const StochasticSystem& system, const DPGrid& grid, std::span<const double> x,
                      std::span<const double> u, const std::function<double(std::span<const double>)>& f);

struct McEstimate {
  double probability = 0.0;
  /// 95% binomial half-width, 1.96 sqrt(p (1 - p) / rollouts).
  double half_width = 0.0;
  std::int64_t rollouts = 0;
  std::int64_t hits = 0;
};

/// Frequency of the terminal-hitting event over independent closed-loop rollouts
/// from x0. Rollouts are drawn in fixed blocks with their own streams, so the
/// estimate depends only on (seed, rollouts).
McEstimate mc_value(const StochasticSystem& system, const ReachSpec& spec, std::span<const double> x0,
                    std::int64_t rollouts, std::uint64_t seed);

}  // namespace rkreach
