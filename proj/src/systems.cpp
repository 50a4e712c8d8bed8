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

#include "rkreach/systems.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iostream>
#include <string>

#include "rkreach/errors.hpp"
#include "rkreach/parallel.hpp"
#include "rkreach/simd.hpp"

namespace rkreach {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::atomic<bool> g_bounds_warning_issued{false};

// Small states draw the disturbance into a stack buffer.
constexpr std::size_t kInlineDim = 8;

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

double Rng::uniform(double lower, double upper) {
  return std::uniform_real_distribution<double>(lower, upper)(engine_);
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

double Rng::beta(double alpha, double beta) {
  const double x = gamma(alpha);
  const double y = gamma(beta);
  return x / (x + y);
}

void validate_disturbance(const DisturbanceSpec& spec, Index dim) {
  if (const auto* g = std::get_if<GaussianIid>(&spec)) {
    if (g->variance.size() != 1 && g->variance.size() != dim) {
      throw InputError("Gaussian disturbance needs 1 or " + std::to_string(dim) + " variances");
    }
    if (!(g->variance.array() > 0.0).all() || !g->variance.allFinite()) {
      throw InputError("Gaussian disturbance variances must be positive");
    }
  } else if (const auto* b = std::get_if<BetaIid>(&spec)) {
    if (!(b->alpha > 0.0) || !(b->beta > 0.0)) {
      throw InputError("Beta disturbance shape parameters must be positive");
    }
  }
}

void sample_disturbance(const DisturbanceSpec& spec, Rng& rng, std::span<double> out) {
  if (const auto* g = std::get_if<GaussianIid>(&spec)) {
    const bool broadcast = g->variance.size() == 1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double var = broadcast ? g->variance[0] : g->variance[static_cast<Index>(i)];
      out[i] = std::sqrt(var) * rng.normal();
    }
  } else if (const auto* b = std::get_if<BetaIid>(&spec)) {
    const double shift = b->centered ? b->alpha / (b->alpha + b->beta) : 0.0;
    for (auto& w : out) w = rng.beta(b->alpha, b->beta) - shift;
  } else {
    for (auto& w : out) w = 0.0;
  }
}

void StochasticSystem::check_dims(std::span<const double> x, std::span<const double> u,
                                  std::span<double> out) const {
  if (static_cast<Index>(x.size()) != state_dim() || static_cast<Index>(out.size()) != state_dim() ||
      static_cast<Index>(u.size()) != control_dim()) {
    throw InputError(name() + ": expected state dimension " + std::to_string(state_dim()) +
                     " and control dimension " + std::to_string(control_dim()));
  }
}

void StochasticSystem::step(std::span<const double> x, std::span<const double> u, Rng& rng,
                            std::span<double> out) const {
  drift(x, u, out);
  if (control_bounds_ && !control_bounds_->contains(u) &&
      !g_bounds_warning_issued.exchange(true)) {
    std::clog << "warning: " << name() << " control outside declared bounds; applied unchanged\n";
  }
  if (std::holds_alternative<NoDisturbance>(disturbance_)) return;
  const auto dim = static_cast<std::size_t>(state_dim());
  if (dim <= kInlineDim) {
    std::array<double, kInlineDim> w;
    sample_disturbance(disturbance_, rng, {w.data(), dim});
    for (std::size_t i = 0; i < dim; ++i) out[i] += w[i];
    return;
  }
  std::vector<double> w(dim);
  sample_disturbance(disturbance_, rng, w);
  for (std::size_t i = 0; i < dim; ++i) out[i] += w[i];
}

// ---------------------------------------------------------------------------
// Integrator chain

IntegratorChain::IntegratorChain(Index dim, double sampling_time, DisturbanceSpec disturbance)
    : StochasticSystem(std::move(disturbance), std::nullopt), dim_(dim), sampling_time_(sampling_time) {
  if (dim < 1) throw InputError("integrator dimension must be at least 1");
  if (!(sampling_time > 0.0) || !std::isfinite(sampling_time)) {
    throw InputError("sampling time must be positive");
  }
  validate_disturbance(this->disturbance(), dim);
  double c = 1.0;
  coefficients_.push_back(c);
  for (Index d = 1; d <= dim; ++d) {
    c = c * sampling_time / static_cast<double>(d);
    if (c == 0.0) break;
    coefficients_.push_back(c);
  }
}

double IntegratorChain::a(Index i, Index j) const {
  if (j < i) return 0.0;
  const auto d = static_cast<std::size_t>(j - i);
  return d < coefficients_.size() ? coefficients_[d] : 0.0;
}

double IntegratorChain::b(Index i) const {
  const auto d = static_cast<std::size_t>(dim_ - i);
  return d < coefficients_.size() ? coefficients_[d] : 0.0;
}

void IntegratorChain::drift(std::span<const double> x, std::span<const double> u,
                            std::span<double> out) const {
  check_dims(x, u, out);
  const auto& kernels = simd::active();
  const auto n = static_cast<std::size_t>(dim_);
  std::fill(out.begin(), out.end(), 0.0);
  // out[i] = sum_d c_d x[i + d]: one shifted axpy per band diagonal.
  for (std::size_t d = 0; d < coefficients_.size() && d < n; ++d) {
    kernels.axpy(coefficients_[d], x.data() + d, out.data(), n - d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = n - i;
    if (d < coefficients_.size()) out[i] += coefficients_[d] * u[0];
  }
}

// ---------------------------------------------------------------------------
// CWH

double orbital_rate(double altitude_km) {
  constexpr double kEarthMu = 398600.4418;  // km^3 / s^2
  constexpr double kEarthRadius = 6378.137;  // km
  const double r = kEarthRadius + altitude_km;
  return std::sqrt(kEarthMu / (r * r * r));
}

CwhSystem::CwhSystem(CwhParameters params)
    : StochasticSystem(GaussianIid{(Vector(4) << 1e-4, 1e-4, 5e-8, 5e-8).finished()},
                       Box::cube(2, -0.1, 0.1)),
      params_(params),
      omega_(orbital_rate(params.altitude_km)) {
  if (!(params.mass_kg > 0.0) || !(params.sampling_time_s > 0.0) || !(params.altitude_km > -6000.0)) {
    throw InputError("CWH parameters must be positive");
  }
  const double n = omega_;
  const double t = params.sampling_time_s;
  const double c = std::cos(n * t);
  const double s = std::sin(n * t);
  a_ << 4.0 - 3.0 * c, 0.0, s / n, 2.0 * (1.0 - c) / n,
        6.0 * (s - n * t), 1.0, -2.0 * (1.0 - c) / n, (4.0 * s - 3.0 * n * t) / n,
        3.0 * n * s, 0.0, c, 2.0 * s,
        -6.0 * n * (1.0 - c), 0.0, -2.0 * s, 4.0 * c - 3.0;
  const double inv_m = 1.0 / params.mass_kg;
  b_ << (1.0 - c) / (n * n), 2.0 * (n * t - s) / (n * n),
        -2.0 * (n * t - s) / (n * n), 4.0 * (1.0 - c) / (n * n) - 1.5 * t * t,
        s / n, 2.0 * (1.0 - c) / n,
        -2.0 * (1.0 - c) / n, 4.0 * s / n - 3.0 * t;
  b_ *= inv_m;
}

Eigen::Matrix4d CwhSystem::continuous_a() const {
  const double n = omega_;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 2) = 1.0;
  a(1, 3) = 1.0;
  a(2, 0) = 3.0 * n * n;
  a(2, 3) = 2.0 * n;
  a(3, 2) = -2.0 * n;
  return a;
}

Eigen::Matrix<double, 4, 2> CwhSystem::continuous_b() const {
  Eigen::Matrix<double, 4, 2> b = Eigen::Matrix<double, 4, 2>::Zero();
  b(2, 0) = 1.0 / params_.mass_kg;
  b(3, 1) = 1.0 / params_.mass_kg;
  return b;
}

void CwhSystem::drift(std::span<const double> x, std::span<const double> u,
                      std::span<double> out) const {
  check_dims(x, u, out);
  const Eigen::Map<const Eigen::Vector4d> z(x.data());
  const Eigen::Map<const Eigen::Vector2d> f(u.data());
  Eigen::Map<Eigen::Vector4d>(out.data()) = a_ * z + b_ * f;
}

CwhSets cwh_sets() {
  CwhSets sets;
  sets.target = [](std::span<const double> z) {
    if (z.size() != 4) throw InputError("CWH target set expects a 4-D state");
    return std::abs(z[0]) <= 0.1 && z[1] > -0.1 && z[1] < 0.0 && std::abs(z[2]) <= 0.01 &&
           std::abs(z[3]) <= 0.01;
  };
  sets.safe = [](std::span<const double> z) {
    if (z.size() != 4) throw InputError("CWH safe set expects a 4-D state");
    return std::abs(z[0]) < std::abs(z[1]) && std::abs(z[2]) <= 0.05 && std::abs(z[3]) <= 0.05;
  };
  return sets;
}

// ---------------------------------------------------------------------------
// Policies and samplers

FixedPolicy affine_feedback(Eigen::MatrixXd gain, Vector offset, std::optional<Box> saturation,
                            std::string description) {
  if (gain.rows() != offset.size()) throw InputError("affine feedback: gain rows must match offset size");
  if (saturation && saturation->dim() != offset.size()) {
    throw InputError("affine feedback: saturation box dimension must match the control dimension");
  }
  FixedPolicy policy;
  policy.control_dim = offset.size();
  policy.time_invariant = true;
  policy.description = std::move(description);
  policy.map = [gain = std::move(gain), offset = std::move(offset), saturation = std::move(saturation)](
                   int, std::span<const double> x, std::span<double> u) {
    if (static_cast<Index>(x.size()) != gain.cols()) throw InputError("affine feedback: state dimension mismatch");
    const Vector v = gain * Eigen::Map<const Vector>(x.data(), gain.cols()) + offset;
    for (Index i = 0; i < v.size(); ++i) {
      double ui = v[i];
      if (saturation) ui = std::clamp(ui, saturation->lower[i], saturation->upper[i]);
      u[static_cast<std::size_t>(i)] = ui;
    }
  };
  return policy;
}

FixedPolicy cwh_docking_policy(const CwhSystem& system, Eigen::Vector2d reference, double kp, double kd) {
  const double m = system.parameters().mass_kg;
  Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(2, 4);
  gain(0, 0) = -m * kp;
  gain(1, 1) = -m * kp;
  gain(0, 2) = -m * kd;
  gain(1, 3) = -m * kd;
  const Vector offset = m * kp * reference;
  return affine_feedback(std::move(gain), offset, system.control_bounds(), "cwh-docking-pd");
}

StateSampler uniform_box_sampler(Box box) {
  if (!((box.upper - box.lower).array() >= 0.0).all()) throw InputError("sampler box is inverted");
  return [box = std::move(box)](Rng& rng, std::span<double> out) {
    if (static_cast<Index>(out.size()) != box.dim()) throw InputError("sampler box dimension mismatch");
    for (Index i = 0; i < box.dim(); ++i) {
      out[static_cast<std::size_t>(i)] =
          box.lower[i] == box.upper[i] ? box.lower[i] : rng.uniform(box.lower[i], box.upper[i]);
    }
  };
}

StateSampler closed_loop_sampler(const StochasticSystem& system, FixedPolicy policy,
                                 StateSampler initial, int max_steps) {
  if (max_steps < 0) throw InputError("closed-loop sampler: max_steps must be non-negative");
  if (policy.control_dim != system.control_dim()) {
    throw InputError("closed-loop sampler: policy and system control dimensions differ");
  }
  return [&system, policy = std::move(policy), initial = std::move(initial), max_steps](
             Rng& rng, std::span<double> out) {
    initial(rng, out);
    const int steps = std::min(max_steps, static_cast<int>(rng.uniform(0.0, max_steps + 1.0)));
    std::vector<double> u(static_cast<std::size_t>(policy.control_dim));
    std::vector<double> next(out.size());
    for (int k = 0; k < steps; ++k) {
      policy.map(k, out, u);
      system.step(out, u, rng, next);
      std::copy(next.begin(), next.end(), out.begin());
    }
  };
}

SampleSet generate_samples(const StochasticSystem& system, const FixedPolicy& policy, Index count,
                           const StateSampler& sampler, std::uint64_t seed) {
  if (count < 1) throw InputError("sample count must be at least 1");
  if (policy.control_dim != system.control_dim()) {
    throw InputError("policy control dimension does not match the system");
  }
  const Index n = system.state_dim();
  const Index m = system.control_dim();
  SampleSet samples;
  samples.states.resize(count, n);
  samples.controls.resize(count, m);
  samples.successors.resize(count, n);
  samples.system = system.name();
  samples.policy = policy.description;
  samples.seed = seed;

  parallel_for(static_cast<std::size_t>(count), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = static_cast<Index>(i);
      Rng rng = Rng::stream(seed, i);
      auto x = row_span(samples.states, r);
      auto u = row_span(samples.controls, r);
      sampler(rng, x);
      policy.map(0, x, u);
      system.step(x, u, rng, row_span(samples.successors, r));
    }
  }, 4);
  return samples;
}

}  // namespace rkreach
