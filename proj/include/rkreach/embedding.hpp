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
#include <string>

#include <Eigen/Cholesky>

#include "rkreach/kernel.hpp"
#include "rkreach/types.hpp"

namespace rkreach {

/// M transition triples (x_i, u_i, y_i) with y_i drawn from the unknown
/// transition kernel at (x_i, u_i). Row i of each matrix is one sample.
struct SampleSet {
  Matrix states;
  Matrix controls;  // M x m, m may be 0
  Matrix successors;
  std::string system;
  std::string policy;
  std::uint64_t seed = 0;

  Index size() const { return states.rows(); }
  Index state_dim() const { return states.cols(); }
  Index control_dim() const { return controls.cols(); }

  /// Throws InputError on mismatched row counts, M = 0, mismatched state and
  /// successor dimensions, or non-finite entries.
  void validate() const;
};

/// Concatenates states and controls row-wise into points of the joint space.
Matrix joint_points(const Matrix& states, const Matrix& controls);

/// How the scalar eta in beta = eta (G + lambda M I)^-1 k is chosen.
enum class EtaMode {
  /// eta is the constant EmbeddingOptions::eta.
  Fixed,
  /// eta is chosen per query so the weights sum to one, giving the estimated
  /// embedding unit mass. Queries with no kernel support get zero weights.
  Normalized,
};

struct EmbeddingOptions {
  KernelSpec kernel{0.1};
  double lambda = 1.0;
  EtaMode eta_mode = EtaMode::Normalized;
  double eta = 1.0;
};

struct BetaCoefficients {
  Vector weights;
  Vector query;  // joint (x, u)
};

/// Empirical conditional distribution embedding fitted from a SampleSet.
/// (G + lambda M I) is factorized once at fit; each coefficient vector then
/// costs one pair of triangular solves. Immutable after fit.
class EmbeddingEstimator {
 public:
  static EmbeddingEstimator fit(SampleSet samples, const EmbeddingOptions& options);

  const SampleSet& samples() const { return samples_; }
  const EmbeddingOptions& options() const { return options_; }
  const Matrix& joint() const { return joint_; }
  Index size() const { return samples_.size(); }

  BetaCoefficients beta(std::span<const double> x, std::span<const double> u) const;

  /// M x P matrix whose column p is beta at joint_queries.row(p), from one batched solve.
  Eigen::MatrixXd beta_batch(const Matrix& joint_queries) const;

  /// f_at_successors^T beta(x, u): the estimate of E[f(y)], y ~ Q(. | x, u).
  double expectation(std::span<const double> f_at_successors, std::span<const double> x,
                     std::span<const double> u) const;

  /// P x M kernel rows between joint queries and the joint sample points.
  Matrix query_kernels(const Matrix& joint_queries) const;

  /// eta for each row of query_kernels(...).
  Vector eta_for(const Matrix& query_kernels) const;

  /// (G + lambda M I)^-1 rhs
  Vector solve(const Vector& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  /// ||(G + lambda M I) solve(v) - v|| / ||v||
  double relative_residual(const Vector& v) const;

 private:
  EmbeddingEstimator() = default;

  Matrix joint_query(std::span<const double> x, std::span<const double> u) const;

  SampleSet samples_;
  EmbeddingOptions options_;
  Matrix joint_;
  Eigen::MatrixXd regularized_gram_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Vector mass_;  // (G + lambda M I)^-1 1
};

}  // namespace rkreach
