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

#include "rkreach/reach.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rkreach/errors.hpp"

namespace rkreach {
namespace {

// Kernel rows and eta for one query set under one control assignment.
struct QueryStage {
  Matrix kernels;  // P x M
  Vector eta;      // P
};

QueryStage make_stage(const EmbeddingEstimator& est, const Matrix& joint_queries) {
  QueryStage stage;
  stage.kernels = est.query_kernels(joint_queries);
  stage.eta = est.eta_for(stage.kernels);
  return stage;
}

Matrix with_policy(const FixedPolicy& policy, int k, const Matrix& states) {
  const Index n = states.cols();
  Matrix joint(states.rows(), n + policy.control_dim);
  joint.leftCols(n) = states;
  for (Index i = 0; i < states.rows(); ++i) {
    const double* x = states.data() + i * n;
    double* u = joint.data() + i * joint.cols() + n;
    policy.map(k, {x, static_cast<std::size_t>(n)}, {u, static_cast<std::size_t>(policy.control_dim)});
  }
  return joint;
}

Matrix with_control(const Matrix& states, const Matrix& controls, Index g) {
  Matrix joint(states.rows(), states.cols() + controls.cols());
  joint.leftCols(states.cols()) = states;
  if (controls.cols() > 0) joint.rightCols(controls.cols()).rowwise() = controls.row(g);
  return joint;
}

Vector indicator(const StatePredicate& pred, const Matrix& points) {
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) out[i] = pred(row_span(points, i)) ? 1.0 : 0.0;
  return out;
}

// 1_safe * clamp(eta * (kernels . w), 0, 1)
Vector backup_values(const QueryStage& stage, const Vector& weights, const Vector& safe) {
  const Vector raw = stage.kernels * weights;
  Vector out(raw.size());
  for (Index p = 0; p < raw.size(); ++p) {
    out[p] = safe[p] != 0.0 ? std::clamp(stage.eta[p] * raw[p], 0.0, 1.0) : 0.0;
  }
  return out;
}

void check_points(const EmbeddingEstimator& est, const Matrix& points) {
  if (points.rows() < 1) throw InputError("value recursion: no evaluation points");
  if (points.cols() != est.samples().state_dim()) {
    throw InputError("value recursion: evaluation points have dimension " +
                     std::to_string(points.cols()) + ", samples have " +
                     std::to_string(est.samples().state_dim()));
  }
  if (!points.allFinite()) throw InputError("value recursion: non-finite evaluation points");
}

ValueField start_field(const ReachSpec& spec, const Matrix& points) {
  ValueField field;
  field.points = points;
  field.values = Eigen::MatrixXd::Zero(spec.horizon + 1, points.rows());
  field.values.row(spec.horizon) = indicator(spec.target, points).transpose();
  return field;
}

}  // namespace

Box Box::cube(Index dim, double lower, double upper) {
  if (dim < 1) throw InputError("box dimension must be at least 1");
  if (!(lower <= upper)) throw InputError("box lower bound exceeds upper bound");
  return Box{Vector::Constant(dim, lower), Vector::Constant(dim, upper)};
}

bool Box::contains(std::span<const double> x) const {
  if (static_cast<Index>(x.size()) != dim()) throw InputError("box membership: dimension mismatch");
  for (Index i = 0; i < dim(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

bool Box::contains_strictly(std::span<const double> x) const {
  if (static_cast<Index>(x.size()) != dim()) throw InputError("box membership: dimension mismatch");
  for (Index i = 0; i < dim(); ++i) {
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  }
  return true;
}

Box Box::inflated(double fraction) const {
  const Vector pad = 0.5 * fraction * (upper - lower);
  return Box{lower - pad, upper + pad};
}

StatePredicate box_predicate(Box box) {
  return [box = std::move(box)](std::span<const double> x) { return box.contains(x); };
}

FixedPolicy constant_policy(Vector u) {
  FixedPolicy policy;
  policy.control_dim = u.size();
  policy.time_invariant = true;
  policy.description = "constant";
  policy.map = [u = std::move(u)](int, std::span<const double>, std::span<double> out) {
    for (Index i = 0; i < u.size(); ++i) out[i] = u[i];
  };
  return policy;
}

void ReachSpec::validate() const {
  if (horizon < 1) throw InputError("horizon must be at least 1");
  if (!safe || !target) throw InputError("safe and target sets must be provided");
  if (const auto* grid = std::get_if<ControlGrid>(&policy)) {
    if (grid->controls.rows() < 1) throw InputError("control grid is empty");
    if (grid->bounds) {
      if (grid->bounds->dim() != grid->controls.cols()) {
        throw InputError("control bounds dimension does not match the control grid");
      }
      for (Index g = 0; g < grid->controls.rows(); ++g) {
        if (!grid->bounds->contains(row_span(grid->controls, g))) {
          throw InputError("control grid entry " + std::to_string(g) + " lies outside the control bounds");
        }
      }
    }
  } else if (!std::get<FixedPolicy>(policy).map) {
    throw InputError("fixed policy has no map");
  }
}

ValueField value_recursion(const EmbeddingEstimator& est, const ReachSpec& spec,
                           const Matrix& points) {
  spec.validate();
  const auto* policy = std::get_if<FixedPolicy>(&spec.policy);
  if (policy == nullptr) {
    throw ContractError("value_recursion requires a fixed policy; use value_recursion_max for a control grid");
  }
  if (policy->control_dim != est.samples().control_dim()) {
    throw InputError("policy control dimension does not match the samples");
  }
  check_points(est, points);

  const Matrix& successors = est.samples().successors;
  const Vector safe_eval = indicator(spec.safe, points);
  const Vector safe_succ = indicator(spec.safe, successors);
  ValueField field = start_field(spec, points);

  // Successor values Y_{k+1}, starting from the target indicator at k + 1 = N.
  Vector next = indicator(spec.target, successors);

  QueryStage eval_stage;
  QueryStage succ_stage;
  const int n_steps = spec.horizon;
  for (int k = n_steps - 1; k >= 0; --k) {
    if (k == n_steps - 1 || !policy->time_invariant) {
      eval_stage = make_stage(est, with_policy(*policy, k, points));
      if (k > 0) succ_stage = make_stage(est, with_policy(*policy, k, successors));
    }
    // Y^T beta(x) = eta(x) * k(x)^T (G + lambda M I)^-1 Y
    const Vector weights = est.solve(next);
    field.values.row(k) = backup_values(eval_stage, weights, safe_eval).transpose();
    if (k > 0) next = backup_values(succ_stage, weights, safe_succ);
  }
  return field;
}

ValueField value_recursion_max(const EmbeddingEstimator& est, const ReachSpec& spec,
                               const Matrix& points) {
  spec.validate();
  const auto* grid = std::get_if<ControlGrid>(&spec.policy);
  if (grid == nullptr) {
    throw ContractError("value_recursion_max requires a control grid policy");
  }
  if (grid->controls.cols() != est.samples().control_dim()) {
    throw InputError("control grid dimension does not match the samples");
  }
  check_points(est, points);

  const Matrix& successors = est.samples().successors;
  const Index n_controls = grid->controls.rows();
  const Vector safe_eval = indicator(spec.safe, points);
  const Vector safe_succ = indicator(spec.safe, successors);
  ValueField field = start_field(spec, points);
  field.policy_choices = Eigen::MatrixXi::Zero(spec.horizon, points.rows());

  std::vector<QueryStage> eval_stages;
  std::vector<QueryStage> succ_stages;
  eval_stages.reserve(static_cast<std::size_t>(n_controls));
  for (Index g = 0; g < n_controls; ++g) {
    eval_stages.push_back(make_stage(est, with_control(points, grid->controls, g)));
    if (spec.horizon > 1) succ_stages.push_back(make_stage(est, with_control(successors, grid->controls, g)));
  }

  Vector next = indicator(spec.target, successors);
  for (int k = spec.horizon - 1; k >= 0; --k) {
    const Vector weights = est.solve(next);

    Vector best = Vector::Constant(points.rows(), -std::numeric_limits<double>::infinity());
    for (Index g = 0; g < n_controls; ++g) {
      const Vector v = backup_values(eval_stages[static_cast<std::size_t>(g)], weights, safe_eval);
      for (Index p = 0; p < v.size(); ++p) {
        if (v[p] > best[p]) {
          best[p] = v[p];
          field.policy_choices(k, p) = static_cast<int>(g);
        }
      }
    }
    field.values.row(k) = best.transpose();

    if (k > 0) {
      Vector best_succ = Vector::Constant(successors.rows(), -std::numeric_limits<double>::infinity());
      for (Index g = 0; g < n_controls; ++g) {
        best_succ = best_succ.cwiseMax(backup_values(succ_stages[static_cast<std::size_t>(g)], weights, safe_succ));
      }
      next = best_succ;
    }
  }
  return field;
}

namespace exact {

double terminal_value(const ReachSpec& spec, std::span<const double> x) {
  return spec.target(x) ? 1.0 : 0.0;
}

double backup(const ReachSpec& spec, std::span<const double> x, double expected_next) {
  return spec.safe(x) ? expected_next : 0.0;
}

bool hits_target_safely(const ReachSpec& spec, const Matrix& trajectory) {
  const Index n_steps = trajectory.rows() - 1;
  if (n_steps < 0) throw InputError("trajectory is empty");
  for (Index i = 0; i < n_steps; ++i) {
    if (!spec.safe(row_span(trajectory, i))) return false;
  }
  return spec.target(row_span(trajectory, n_steps));
}

double deterministic_probability(const ReachSpec& spec, const DeterministicDynamics& dynamics,
                                 std::span<const double> x0) {
  const auto* policy = std::get_if<FixedPolicy>(&spec.policy);
  if (policy == nullptr) throw ContractError("deterministic_probability requires a fixed policy");
  const auto n = static_cast<Index>(x0.size());
  Matrix trajectory(spec.horizon + 1, n);
  Vector u(policy->control_dim);
  for (Index i = 0; i < n; ++i) trajectory(0, i) = x0[static_cast<std::size_t>(i)];
  for (int k = 0; k < spec.horizon; ++k) {
    policy->map(k, row_span(trajectory, k), {u.data(), static_cast<std::size_t>(u.size())});
    dynamics(row_span(trajectory, k), as_span(u), row_span(trajectory, k + 1));
  }
  return hits_target_safely(spec, trajectory) ? 1.0 : 0.0;
}

}  // namespace exact

}  // namespace rkreach
