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

#include "simd_impl.hpp"

#include <algorithm>
#include <cmath>

namespace rkreach::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void dot_rows(const double* query, const double* rows, std::size_t nrows, std::size_t stride,
              std::size_t n, double* out) {
  for (std::size_t r = 0; r < nrows; ++r) out[r] = dot(query, rows + r * stride, n);
}

void squared_distance_rows(const double* query, const double* rows, std::size_t nrows,
                           std::size_t stride, std::size_t n, double* out) {
  for (std::size_t r = 0; r < nrows; ++r) out[r] = squared_distance(query, rows + r * stride, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gaussian_from_sqdist(double* values, std::size_t n, double scale) {
  for (std::size_t i = 0; i < n; ++i) values[i] = std::exp(-std::max(values[i], 0.0) * scale);
}

}  // namespace rkreach::simd::scalar
