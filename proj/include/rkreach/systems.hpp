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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rkreach/embedding.hpp"
#include "rkreach/reach.hpp"
#include "rkreach/types.hpp"

namespace rkreach {

/// Seeded random stream. Independent streams for parallel work are derived
/// from (seed, index) so results do not depend on how work is partitioned.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  double uniform(double lower, double upper);
  double normal();
  double gamma(double shape);
  double beta(double alpha, double beta);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// i.i.d. zero-mean Gaussian per component; a single variance entry applies to every component.
struct GaussianIid {
  Vector variance;
};

/// i.i.d. Beta(alpha, beta) per component on [0, 1], or shifted to zero mean when centered.
struct BetaIid {
  double alpha = 0.5;
  double beta = 0.5;
  bool centered = false;
};

/// Zero disturbance; turns a system deterministic for testing.
struct NoDisturbance {};

using DisturbanceSpec = std::variant<GaussianIid, BetaIid, NoDisturbance>;

void validate_disturbance(const DisturbanceSpec& spec, Index dim);
void sample_disturbance(const DisturbanceSpec& spec, Rng& rng, std::span<double> out);

/// x_{k+1} = A x_k + B u_k + w_k with i.i.d. additive disturbance.
class StochasticSystem {
 public:
  virtual ~StochasticSystem() = default;

  virtual std::string name() const = 0;
  virtual Index state_dim() const = 0;
  virtual Index control_dim() const = 0;
  /// out = A x + B u
  virtual void drift(std::span<const double> x, std::span<const double> u,
                     std::span<double> out) const = 0;

  const DisturbanceSpec& disturbance() const { return disturbance_; }
  const std::optional<Box>& control_bounds() const { return control_bounds_; }

  /// One transition. A control outside the declared bounds is used as given
  /// and reported once per process on stderr.
  void step(std::span<const double> x, std::span<const double> u, Rng& rng,
            std::span<double> out) const;

 protected:
  StochasticSystem(DisturbanceSpec disturbance, std::optional<Box> control_bounds)
      : disturbance_(std::move(disturbance)), control_bounds_(std::move(control_bounds)) {}

  void check_dims(std::span<const double> x, std::span<const double> u, std::span<double> out) const;

 private:
  DisturbanceSpec disturbance_;
  std::optional<Box> control_bounds_;
};

/// n-D chain of integrators: A(i, j) = T^(j-i)/(j-i)! for j >= i and
/// B(i) = T^(n-i)/(n-i)! (0-indexed), single input at the n-th derivative.
/// Coefficients past the point where T^d/d! underflows are exactly zero, so
/// A is stored as a band and the drift costs O(n * band).
class IntegratorChain final : public StochasticSystem {
 public:
  IntegratorChain(Index dim, double sampling_time, DisturbanceSpec disturbance);

  std::string name() const override { return "integrator"; }
  Index state_dim() const override { return dim_; }
  Index control_dim() const override { return 1; }
  void drift(std::span<const double> x, std::span<const double> u,
             std::span<double> out) const override;

  double sampling_time() const { return sampling_time_; }
  double a(Index i, Index j) const;
  double b(Index i) const;
  /// Number of nonzero super-diagonals of A, plus the main diagonal.
  Index band() const { return static_cast<Index>(coefficients_.size()); }

 private:
  Index dim_;
  double sampling_time_;
  std::vector<double> coefficients_;  // T^d / d!, truncated after the first exact zero
};

struct CwhParameters {
  double altitude_km = 850.0;
  double mass_kg = 300.0;
  double sampling_time_s = 20.0;
};

/// Mean motion sqrt(mu / r^3) of a circular Earth orbit at the given altitude [rad/s].
double orbital_rate(double altitude_km);

/// Discrete-time Clohessy-Wiltshire-Hill relative motion. State
/// z = [x, y, xdot, ydot] in km and km/s (x radial, y along-track), input
/// u = [Fx, Fy] in kN, so acceleration in km/s^2 is u / mass. A and B are the
/// exact zero-order-hold discretization.
class CwhSystem final : public StochasticSystem {
 public:
  explicit CwhSystem(CwhParameters params = {});

  std::string name() const override { return "cwh"; }
  Index state_dim() const override { return 4; }
  Index control_dim() const override { return 2; }
  void drift(std::span<const double> x, std::span<const double> u,
             std::span<double> out) const override;

  const CwhParameters& parameters() const { return params_; }
  double omega() const { return omega_; }
  const Eigen::Matrix4d& a() const { return a_; }
  const Eigen::Matrix<double, 4, 2>& b() const { return b_; }

  /// Continuous-time (A, B) of the linearized equations, for reference checks.
  Eigen::Matrix4d continuous_a() const;
  Eigen::Matrix<double, 4, 2> continuous_b() const;

 private:
  CwhParameters params_;
  double omega_;
  Eigen::Matrix4d a_;
  Eigen::Matrix<double, 4, 2> b_;
};

/// Docking target and line-of-sight safe set:
///   target: |z1| <= 0.1, -0.1 < z2 < 0, |z3| <= 0.01, |z4| <= 0.01
///   safe:   |z1| < |z2|, |z3| <= 0.05, |z4| <= 0.05
struct CwhSets {
  StatePredicate target;
  StatePredicate safe;
};
CwhSets cwh_sets();

/// u = saturate(gain x + offset)
FixedPolicy affine_feedback(Eigen::MatrixXd gain, Vector offset, std::optional<Box> saturation,
                            std::string description);

/// Saturated PD law driving the position toward `reference` (km) with zero velocity.
FixedPolicy cwh_docking_policy(const CwhSystem& system, Eigen::Vector2d reference = {0.0, -0.05},
                               double kp = 1.75e-3, double kd = 0.06);

/// Draws one state into `out`.
using StateSampler = std::function<void(Rng&, std::span<double>)>;

StateSampler uniform_box_sampler(Box box);

/// Draws an initial state, then advances it a uniformly drawn 0..max_steps
/// steps under the policy, yielding states distributed along closed-loop
/// trajectories. `system` must outlive the sampler.
StateSampler closed_loop_sampler(const StochasticSystem& system, FixedPolicy policy,
                                 StateSampler initial, int max_steps);

/// M transitions with x_i from the sampler, u_i = policy(0, x_i) and
/// y_i = step(x_i, u_i). Sample i uses Rng::stream(seed, i).
SampleSet generate_samples(const StochasticSystem& system, const FixedPolicy& policy, Index count,
                           const StateSampler& sampler, std::uint64_t seed);

}  // namespace rkreach
