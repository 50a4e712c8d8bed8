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

#include <cstdlib>
#include <random>
#include <string>

#include "rkreach/systems.hpp"
#include "rkreach/types.hpp"

namespace rkreach::testing {

inline Matrix random_points(Index rows, Index cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

/// Double integrator with Gaussian noise, zero policy, samples uniform on [-1.21, 1.21]^2.
inline SampleSet double_integrator_samples(Index count, std::uint64_t seed, double variance = 0.01) {
  IntegratorChain sys(2, 0.25, GaussianIid{Vector::Constant(1, variance)});
  return generate_samples(sys, constant_policy(Vector::Zero(1)), count,
                          uniform_box_sampler(Box::cube(2, -1.21, 1.21)), seed);
}

/// Deterministic but irregular control in [-1, 1], so sampled controls vary across the state space.
inline FixedPolicy scrambled_policy() {
  FixedPolicy p;
  p.control_dim = 1;
  p.description = "scrambled";
  p.map = [](int, std::span<const double> x, std::span<double> u) {
    double h = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) h += x[i] * (12.9898 + 65.233 * static_cast<double>(i));
    const double f = std::sin(h) * 43758.5453;
    u[0] = 2.0 * (f - std::floor(f)) - 1.0;
  };
  return p;
}

/// Sets an environment variable for the lifetime of the guard.
class EnvGuard {
 public:
  EnvGuard(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~EnvGuard() {
    if (old_.empty()) ::unsetenv(name_);
    else ::setenv(name_, old_.c_str(), 1);
  }

 private:
  const char* name_;
  std::string old_;
};

}  // namespace rkreach::testing
