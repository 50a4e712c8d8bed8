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

// Data-parallel inner loops used by the kernel module and the integrator
// dynamics. Every routine has a scalar reference implementation; vectorized
// variants are compiled per instruction set and chosen at runtime.

#include <cstddef>
#include <string_view>

namespace rkreach::simd {

enum class Level { Scalar, Avx2 };

struct KernelTable {
  Level level;
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);

  /// out[r] = <query, rows + r * stride> for r in [0, nrows).
  void (*dot_rows)(const double* query, const double* rows, std::size_t nrows,
                   std::size_t stride, std::size_t n, double* out);

  /// out[r] = ||query - (rows + r * stride)||^2 for r in [0, nrows).
  void (*squared_distance_rows)(const double* query, const double* rows, std::size_t nrows,
                                std::size_t stride, std::size_t n, double* out);

  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  /// values[i] = exp(-max(values[i], 0) * scale); turns squared distances into
  /// Gaussian kernel values in place.
  void (*gaussian_from_sqdist)(double* values, std::size_t n, double scale);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Kernels used by the library. Defaults to the widest supported level;
/// RKHS_REACH_SIMD=scalar|avx2 overrides.
const KernelTable& active();

/// Pins the active level (falls back to scalar when unsupported). Returns the level in effect.
Level select(Level level);

std::string_view level_name(Level level);

}  // namespace rkreach::simd
