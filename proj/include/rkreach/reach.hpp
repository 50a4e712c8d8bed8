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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "rkreach/embedding.hpp"
#include "rkreach/types.hpp"

namespace rkreach {

/// Deterministic, total membership test over R^n.
using StatePredicate = std::function<bool(std::span<const double>)>;

/// Closed axis-aligned box.
struct Box {
  Vector lower;
  Vector upper;

  static Box cube(Index dim, double lower, double upper);

  Index dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  /// Membership in the open interior (every coordinate strictly inside).
  bool contains_strictly(std::span<const double> x) const;
  /// The box scaled about its center so every side is (1 + fraction) times as long.
  Box inflated(double fraction) const;
};

StatePredicate box_predicate(Box box);

/// u = map(k, x); writes control_dim entries into u.
using PolicyMap = std::function<void(int, std::span<const double>, std::span<double>)>;

struct FixedPolicy {
  PolicyMap map;
  Index control_dim = 0;
  /// When true the map ignores k and coefficient matrices are reused across steps.
  bool time_invariant = true;
  std::string description;
};

FixedPolicy constant_policy(Vector u);

/// Finite control set over which the recursion maximizes at every step.
struct ControlGrid {
  Matrix controls;  // one control per row
  std::optional<Box> bounds;
};

using PolicySpec = std::variant<FixedPolicy, ControlGrid>;

struct ReachSpec {
  StatePredicate safe;
  StatePredicate target;
  int horizon = 1;
  PolicySpec policy;

  void validate() const;
};

/// Value estimates at P evaluation points for k = 0..N.
struct ValueField {
  Matrix points;                   // P x n
  Eigen::MatrixXd values;          // (N + 1) x P; row k is the step-k value
  Eigen::MatrixXi policy_choices;  // N x P grid indices when maximizing, empty otherwise

  int horizon() const { return static_cast<int>(values.rows()) - 1; }
};

/// Kernel-embedding backward recursion under a fixed Markov policy. Row N is
/// the target indicator; for k < N,
///   V_k(x) = 1_safe(x) * clamp(Y_{k+1}^T beta(x, pi_k(x)), 0, 1)
/// where Y_{k+1} holds V_{k+1} at the stored successors.
ValueField value_recursion(const EmbeddingEstimator& est, const ReachSpec& spec, const Matrix& points);

/// Same recursion with the fixed policy replaced by a maximum over a finite
/// control grid; ties go to the lowest grid index.
ValueField value_recursion_max(const EmbeddingEstimator& est, const ReachSpec& spec,
                               const Matrix& points);

/// The exact terminal-hitting recursion, stated as executable contracts. The
/// oracles and the tests build on these so the definitions live in one place.
namespace exact {

/// V_N(x) = 1_target(x)
double terminal_value(const ReachSpec& spec, std::span<const double> x);

/// V_k(x) = 1_safe(x) E[V_{k+1}(y)] given the continuation expectation.
double backup(const ReachSpec& spec, std::span<const double> x, double expected_next);

/// The terminal-hitting event for one realized trajectory x_0..x_N (rows):
/// x_N in target and x_i in safe for all i < N.
bool hits_target_safely(const ReachSpec& spec, const Matrix& trajectory);

/// Safety probability of a deterministic closed loop x_{k+1} = f(x_k, pi_k(x_k)),
/// which is either 0 or 1.
using DeterministicDynamics =
    std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;
double deterministic_probability(const ReachSpec& spec, const DeterministicDynamics& dynamics,
                                 std::span<const double> x0);

}  // namespace exact

}  // namespace rkreach
