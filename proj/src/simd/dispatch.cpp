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

#include <atomic>
#include <cstdlib>
#include <string>

namespace rkreach::simd {
namespace {

constexpr KernelTable kScalarTable{
    Level::Scalar,
    "scalar",
    &scalar::dot,
    &scalar::squared_distance,
    &scalar::dot_rows,
    &scalar::squared_distance_rows,
    &scalar::axpy,
    &scalar::gaussian_from_sqdist,
};

#if defined(RKREACH_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    Level::Avx2,
    "avx2",
    &avx2::dot,
    &avx2::squared_distance,
    &avx2::dot_rows,
    &avx2::squared_distance_rows,
    &avx2::axpy,
    &avx2::gaussian_from_sqdist,
};

bool cpu_has_avx2_fma() {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const KernelTable* initial_table() {
  const char* env = std::getenv("RKHS_REACH_SIMD");
  const std::string requested = env ? env : "auto";
  if (requested == "scalar") return &kScalarTable;
  if (const KernelTable* wide = avx2_kernels()) return wide;
  return &kScalarTable;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(RKREACH_HAVE_AVX2)
  static const bool supported = cpu_has_avx2_fma();
  return supported ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

Level select(Level level) {
  const KernelTable* table = &kScalarTable;
  if (level == Level::Avx2 && avx2_kernels() != nullptr) table = avx2_kernels();
  active_slot().store(table, std::memory_order_release);
  return table->level;
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace rkreach::simd
