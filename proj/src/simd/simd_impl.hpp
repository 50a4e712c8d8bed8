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

#include <cstddef>

#include "rkreach/simd.hpp"

namespace rkreach::simd {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t nrows, std::size_t stride,
              std::size_t n, double* out);
void squared_distance_rows(const double* query, const double* rows, std::size_t nrows,
                           std::size_t stride, std::size_t n, double* out);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gaussian_from_sqdist(double* values, std::size_t n, double scale);
}  // namespace scalar

#if defined(RKREACH_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t nrows, std::size_t stride,
              std::size_t n, double* out);
void squared_distance_rows(const double* query, const double* rows, std::size_t nrows,
                           std::size_t stride, std::size_t n, double* out);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gaussian_from_sqdist(double* values, std::size_t n, double scale);
}  // namespace avx2
#endif

}  // namespace rkreach::simd
