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

#include "rkreach/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rkreach/errors.hpp"
#include "rkreach/parallel.hpp"
#include "rkreach/simd.hpp"

namespace rkreach {
namespace {

Vector squared_norms(const Matrix& points) {
  const auto& kernels = simd::active();
  Vector norms(points.rows());
  const auto dim = static_cast<std::size_t>(points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    const double* p = points.data() + i * points.cols();
    norms[i] = kernels.dot(p, p, dim);
  }
  return norms;
}

void require_points(const Matrix& points, const char* what) {
  if (points.rows() < 1) throw InputError(std::string(what) + ": point set is empty");
  if (!points.allFinite()) throw InputError(std::string(what) + ": non-finite coordinates");
}

// Fills out[0..count) with kernel values between `query` and `count`
// consecutive rows starting at `rows`.
void kernel_row(const KernelSpec& spec, const double* query, double query_norm, const double* rows,
                const double* row_norms, std::size_t count, std::size_t dim, double* out) {
  const auto& kernels = simd::active();
  if (static_cast<Index>(dim) >= kExpandedFormMinDim) {
    kernels.dot_rows(query, rows, count, dim, dim, out);
    for (std::size_t j = 0; j < count; ++j) out[j] = query_norm + row_norms[j] - 2.0 * out[j];
  } else {
    kernels.squared_distance_rows(query, rows, count, dim, dim, out);
  }
  kernels.gaussian_from_sqdist(out, count, spec.distance_scale());
}

}  // namespace

KernelSpec::KernelSpec(double sigma, KernelFamily family)
    : family_(family), sigma_(sigma), distance_scale_(0.0) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InputError("kernel bandwidth sigma must be positive and finite");
  }
  distance_scale_ = 1.0 / (2.0 * sigma * sigma);
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("kernel_eval: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  const double d2 = simd::active().squared_distance(a.data(), b.data(), a.size());
  return std::exp(-d2 * spec.distance_scale());
}

GramMatrix gram(const KernelSpec& spec, const Matrix& points) {
  require_points(points, "gram");
  const Index m = points.rows();
  const auto dim = static_cast<std::size_t>(points.cols());
  const Vector norms = squared_norms(points);
  GramMatrix g(m, m);

  // Column j of the column-major result receives entries i >= j, computed as
  // one contiguous kernel_row against rows j..m-1; the upper triangle is mirrored after.
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto jj = static_cast<Index>(j);
      const double* pj = points.data() + jj * points.cols();
      kernel_row(spec, pj, norms[jj], pj, norms.data() + jj, static_cast<std::size_t>(m - jj), dim,
                 g.col(jj).data() + jj);
      g(jj, jj) = 1.0;
    }
  }, 4);
  for (Index j = 1; j < m; ++j) {
    for (Index i = 0; i < j; ++i) g(i, j) = g(j, i);
  }
  return g;
}

Vector kernel_vector(const KernelSpec& spec, const Matrix& points, std::span<const double> query) {
  require_points(points, "kernel_vector");
  if (static_cast<Index>(query.size()) != points.cols()) {
    throw InputError("kernel_vector: query dimension " + std::to_string(query.size()) +
                     " does not match point dimension " + std::to_string(points.cols()));
  }
  const auto dim = static_cast<std::size_t>(points.cols());
  const Vector norms = dim >= static_cast<std::size_t>(kExpandedFormMinDim) ? squared_norms(points)
                                                                            : Vector(points.rows());
  const double qn = simd::active().dot(query.data(), query.data(), dim);
  Vector out(points.rows());
  kernel_row(spec, query.data(), qn, points.data(), norms.data(),
             static_cast<std::size_t>(points.rows()), dim, out.data());
  return out;
}

Matrix cross_kernel(const KernelSpec& spec, const Matrix& queries, const Matrix& points) {
  require_points(points, "cross_kernel");
  if (queries.cols() != points.cols()) {
    throw InputError("cross_kernel: query dimension " + std::to_string(queries.cols()) +
                     " does not match point dimension " + std::to_string(points.cols()));
  }
  if (!queries.allFinite()) throw InputError("cross_kernel: non-finite query coordinates");
  const auto dim = static_cast<std::size_t>(points.cols());
  const bool expanded = points.cols() >= kExpandedFormMinDim;
  const Vector point_norms = expanded ? squared_norms(points) : Vector(points.rows());
  const Vector query_norms = expanded ? squared_norms(queries) : Vector::Zero(queries.rows()).eval();

  Matrix out(queries.rows(), points.rows());
  parallel_for(static_cast<std::size_t>(queries.rows()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const auto qq = static_cast<Index>(q);
      kernel_row(spec, queries.data() + qq * queries.cols(), query_norms[qq], points.data(),
                 point_norms.data(), static_cast<std::size_t>(points.rows()), dim,
                 out.data() + qq * out.cols());
    }
  }, 4);
  return out;
}

}  // namespace rkreach
