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

#include "rkreach/embedding.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "rkreach/errors.hpp"

namespace rkreach {

void SampleSet::validate() const {
  const Index m = states.rows();
  if (m < 1) throw InputError("sample set is empty");
  if (controls.rows() != m || successors.rows() != m) {
    throw InputError("sample set: states, controls and successors must have the same row count");
  }
  if (successors.cols() != states.cols()) {
    throw InputError("sample set: successor dimension " + std::to_string(successors.cols()) +
                     " differs from state dimension " + std::to_string(states.cols()));
  }
  if (states.cols() < 1) throw InputError("sample set: state dimension must be at least 1");
  if (!states.allFinite() || !controls.allFinite() || !successors.allFinite()) {
    throw InputError("sample set contains non-finite entries");
  }
}

Matrix joint_points(const Matrix& states, const Matrix& controls) {
  if (states.rows() != controls.rows()) {
    throw InputError("joint_points: states and controls have different row counts");
  }
  Matrix joint(states.rows(), states.cols() + controls.cols());
  joint.leftCols(states.cols()) = states;
  if (controls.cols() > 0) joint.rightCols(controls.cols()) = controls;
  return joint;
}

EmbeddingEstimator EmbeddingEstimator::fit(SampleSet samples, const EmbeddingOptions& options) {
  samples.validate();
  if (!(options.lambda > 0.0) || !std::isfinite(options.lambda)) {
    throw InputError("regularization lambda must be positive and finite");
  }
  if (options.eta_mode == EtaMode::Fixed && !std::isfinite(options.eta)) {
    throw InputError("fixed eta must be finite");
  }

  EmbeddingEstimator est;
  est.options_ = options;
  est.joint_ = joint_points(samples.states, samples.controls);
  est.samples_ = std::move(samples);

  const Index m = est.samples_.size();
  est.regularized_gram_ = gram(options.kernel, est.joint_);
  est.regularized_gram_.diagonal().array() += options.lambda * static_cast<double>(m);
  est.factor_.compute(est.regularized_gram_);
  if (est.factor_.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of G + lambda M I failed");
  }
  est.mass_ = est.factor_.solve(Vector::Ones(m));
  if (!est.mass_.allFinite()) throw NumericalError("solve against G + lambda M I produced non-finite values");
  return est;
}

Matrix EmbeddingEstimator::joint_query(std::span<const double> x, std::span<const double> u) const {
  if (static_cast<Index>(x.size()) != samples_.state_dim() ||
      static_cast<Index>(u.size()) != samples_.control_dim()) {
    throw InputError("query (x, u) has dimension (" + std::to_string(x.size()) + ", " +
                     std::to_string(u.size()) + "), samples have (" +
                     std::to_string(samples_.state_dim()) + ", " +
                     std::to_string(samples_.control_dim()) + ")");
  }
  Matrix q(1, joint_.cols());
  for (std::size_t i = 0; i < x.size(); ++i) q(0, static_cast<Index>(i)) = x[i];
  for (std::size_t i = 0; i < u.size(); ++i) q(0, static_cast<Index>(x.size() + i)) = u[i];
  return q;
}

Matrix EmbeddingEstimator::query_kernels(const Matrix& joint_queries) const {
  return cross_kernel(options_.kernel, joint_queries, joint_);
}

Vector EmbeddingEstimator::eta_for(const Matrix& query_kernels) const {
  if (options_.eta_mode == EtaMode::Fixed) {
    return Vector::Constant(query_kernels.rows(), options_.eta);
  }
  const Vector mass = query_kernels * mass_;
  Vector eta(mass.size());
  for (Index p = 0; p < mass.size(); ++p) {
    eta[p] = (mass[p] > DBL_MIN && std::isfinite(mass[p])) ? 1.0 / mass[p] : 0.0;
  }
  return eta;
}

Vector EmbeddingEstimator::solve(const Vector& rhs) const {
  if (rhs.size() != size()) throw InputError("solve: right-hand side length does not match M");
  return factor_.solve(rhs);
}

Eigen::MatrixXd EmbeddingEstimator::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != size()) throw InputError("solve: right-hand side rows do not match M");
  return factor_.solve(rhs);
}

double EmbeddingEstimator::relative_residual(const Vector& v) const {
  const double norm = v.norm();
  if (norm == 0.0) return 0.0;
  return (regularized_gram_ * solve(v) - v).norm() / norm;
}

Eigen::MatrixXd EmbeddingEstimator::beta_batch(const Matrix& joint_queries) const {
  if (joint_queries.cols() != joint_.cols()) {
    throw InputError("beta_batch: joint query dimension does not match the samples");
  }
  const Matrix k = query_kernels(joint_queries);
  const Vector eta = eta_for(k);
  Eigen::MatrixXd betas = factor_.solve(Eigen::MatrixXd(k.transpose()));
  betas *= eta.asDiagonal();
  return betas;
}

BetaCoefficients EmbeddingEstimator::beta(std::span<const double> x,
                                          std::span<const double> u) const {
  Matrix q = joint_query(x, u);
  BetaCoefficients out;
  out.weights = beta_batch(q).col(0);
  out.query = q.row(0).transpose();
  return out;
}

double EmbeddingEstimator::expectation(std::span<const double> f_at_successors,
                                       std::span<const double> x,
                                       std::span<const double> u) const {
  if (static_cast<Index>(f_at_successors.size()) != size()) {
    throw InputError("expectation: function values must be given at all " +
                     std::to_string(size()) + " successors");
  }
  const Vector weights = beta(x, u).weights;
  return Eigen::Map<const Vector>(f_at_successors.data(), size()).dot(weights);
}

}  // namespace rkreach
