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

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>

#include "rkreach/errors.hpp"
#include "rkreach/oracle.hpp"

namespace rkreach {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InputError("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule{Vector(n), Vector(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule truncated_gaussian_rule(double variance, int n, double truncation) {
  return composite_gaussian_rule(variance, n, truncation, {});
}

QuadratureRule composite_gaussian_rule(double variance, int n, double truncation, std::span<const double> cuts) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("quadrature variance must be positive");
  if (!(truncation > 0.0)) throw InputError("quadrature truncation must be positive");
  const double sd = std::sqrt(variance);
  const double half_width = truncation * sd;
  std::vector<double> edges{-half_width};
  for (const double c : cuts) {
    if (c > -half_width && c < half_width) edges.push_back(c);
  }
  edges.push_back(half_width);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const QuadratureRule base = gauss_legendre(n);
  const auto pieces = static_cast<Index>(edges.size()) - 1;
  QuadratureRule rule{Vector(pieces * n), Vector(pieces * n)};
  for (Index piece = 0; piece < pieces; ++piece) {
    const double lo = edges[static_cast<std::size_t>(piece)];
    const double hi = edges[static_cast<std::size_t>(piece) + 1];
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (Index i = 0; i < n; ++i) {
      const double w = mid + half * base.nodes[i];
      const double z = w / sd;
      rule.nodes[piece * n + i] = w;
      rule.weights[piece * n + i] = base.weights[i] * half * std::exp(-0.5 * z * z);
    }
  }
  rule.weights /= rule.weights.sum();
  return rule;
}

}  // namespace rkreach
