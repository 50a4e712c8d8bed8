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

#include <span>

#include "rkreach/types.hpp"

namespace rkreach {

enum class KernelFamily { GaussianRbf };

/// Positive-definite radial kernel K(a, b) = exp(-||a - b||^2 / (2 sigma^2)).
class KernelSpec {
 public:
  explicit KernelSpec(double sigma, KernelFamily family = KernelFamily::GaussianRbf);

  KernelFamily family() const { return family_; }
  double sigma() const { return sigma_; }
  /// 1 / (2 sigma^2), the factor applied to squared distances.
  double distance_scale() const { return distance_scale_; }

 private:
  KernelFamily family_;
  double sigma_;
  double distance_scale_;
};

/// Symmetric positive semi-definite M x M matrix of pairwise kernel values.
using GramMatrix = Eigen::MatrixXd;

/// Below this dimension squared distances are accumulated directly; at or
/// above it they use ||a||^2 + ||b||^2 - 2 a.b so the inner loop is a dot product.
inline constexpr Index kExpandedFormMinDim = 16;

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

GramMatrix gram(const KernelSpec& spec, const Matrix& points);

Vector kernel_vector(const KernelSpec& spec, const Matrix& points, std::span<const double> query);

/// Row q holds kernel_vector(spec, points, queries.row(q)).
Matrix cross_kernel(const KernelSpec& spec, const Matrix& queries, const Matrix& points);

}  // namespace rkreach
