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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "rkreach/kernel.hpp"
#include "rkreach/simd.hpp"

using namespace rkreach;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 33, 100, 1001};

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar table is always available and named") {
    CHECK(simd::scalar_kernels().level == simd::Level::Scalar);
    CHECK(simd::level_name(simd::Level::Avx2) == "avx2");
  }

  TEST_CASE("avx2 variants match the scalar reference") {
    const simd::KernelTable* wide = simd::avx2_kernels();
    if (wide == nullptr) {
      MESSAGE("AVX2 not available on this host; equivalence not exercised");
      return;
    }
    const auto& ref = simd::scalar_kernels();
    for (const std::size_t n : kSizes) {
      CAPTURE(n);
      const auto a = random_vec(n, 1 + n);
      const auto b = random_vec(n, 1000 + n);
      CHECK(close(wide->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-13, 1e-13));
      CHECK(close(wide->squared_distance(a.data(), b.data(), n), ref.squared_distance(a.data(), b.data(), n), 1e-13));

      const std::size_t rows = 9;
      const std::size_t stride = n + 3;
      const auto block = random_vec(rows * stride, 77 + n);
      std::vector<double> out_ref(rows), out_wide(rows);
      ref.dot_rows(a.data(), block.data(), rows, stride, n, out_ref.data());
      wide->dot_rows(a.data(), block.data(), rows, stride, n, out_wide.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(close(out_wide[r], out_ref[r], 1e-13, 1e-13));
      ref.squared_distance_rows(a.data(), block.data(), rows, stride, n, out_ref.data());
      wide->squared_distance_rows(a.data(), block.data(), rows, stride, n, out_wide.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(close(out_wide[r], out_ref[r], 1e-13));

      auto y_ref = random_vec(n, 5 + n);
      auto y_wide = y_ref;
      ref.axpy(0.37, a.data(), y_ref.data(), n);
      wide->axpy(0.37, a.data(), y_wide.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(close(y_wide[i], y_ref[i], 1e-15, 1e-15));
    }
  }

  TEST_CASE("vectorized Gaussian map matches std::exp across the full range") {
    const simd::KernelTable* wide = simd::avx2_kernels();
    if (wide == nullptr) return;
    const auto& ref = simd::scalar_kernels();
    // Squared distances from 0 to deep underflow, plus negative roundoff.
    std::vector<double> d2;
    for (int i = 0; i < 4000; ++i) d2.push_back(1e-6 * std::pow(1.01, i) - 1e-12);
    d2.push_back(0.0);
    d2.push_back(-3e-17);
    for (const double scale : {0.5, 50.0, 1e4}) {
      auto v_ref = d2;
      auto v_wide = d2;
      ref.gaussian_from_sqdist(v_ref.data(), v_ref.size(), scale);
      wide->gaussian_from_sqdist(v_wide.data(), v_wide.size(), scale);
      for (std::size_t i = 0; i < d2.size(); ++i) {
        CAPTURE(d2[i]);
        CHECK(close(v_wide[i], v_ref[i], 4e-15, 1e-300));
        CHECK(v_wide[i] <= 1.0);
        CHECK(v_wide[i] >= 0.0);
      }
    }
  }

  TEST_CASE("Gram matrices agree across kernel levels") {
    if (simd::avx2_kernels() == nullptr) return;
    const KernelSpec spec(0.7);
    for (const Index dim : {Index{3}, Index{40}}) {
      const Matrix pts = testing::random_points(37, dim, 9);
      simd::select(simd::Level::Scalar);
      const GramMatrix g_ref = gram(spec, pts);
      simd::select(simd::Level::Avx2);
      const GramMatrix g_wide = gram(spec, pts);
      CHECK((g_ref - g_wide).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("select falls back to scalar and reports the level in effect") {
    CHECK(simd::select(simd::Level::Scalar) == simd::Level::Scalar);
    CHECK(simd::active().level == simd::Level::Scalar);
    const simd::Level got = simd::select(simd::Level::Avx2);
    CHECK(got == (simd::avx2_kernels() ? simd::Level::Avx2 : simd::Level::Scalar));
  }
}
