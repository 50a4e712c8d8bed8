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

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "rkreach/errors.hpp"
#include "rkreach/systems.hpp"

using namespace rkreach;

namespace {

// T^d / d! through logs, independent of the library's running product.
double taylor_coefficient(double t, int d) {
  return std::exp(d * std::log(t) - std::lgamma(d + 1.0));
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

Vector step_once(const StochasticSystem& sys, const Vector& x, const Vector& u, Rng& rng) {
  Vector out(x.size());
  sys.step(as_span(x), as_span(u), rng, {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

}  // namespace

TEST_SUITE("systems") {
  TEST_CASE("integrator step examples") {
    Rng rng(1);
    IntegratorChain quiet(2, 0.25, NoDisturbance{});
    const Vector zero2 = Vector::Zero(2);
    const Vector u0 = Vector::Zero(1);
    CHECK(step_once(quiet, zero2, u0, rng) == zero2);
    const Vector y = step_once(quiet, vec({1.0, 1.0}), u0, rng);
    CHECK(y[0] == 1.25);
    CHECK(y[1] == 1.0);
    const Vector yu = step_once(quiet, zero2, Vector::Constant(1, 2.0), rng);
    CHECK(yu[0] == doctest::Approx(2.0 * 0.03125));
    CHECK(yu[1] == doctest::Approx(2.0 * 0.25));
  }

  TEST_CASE("integrator A and B follow the factorial closed form") {
    for (const Index n : {Index{2}, Index{5}, Index{100}}) {
      CAPTURE(n);
      IntegratorChain sys(n, 0.25, NoDisturbance{});
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      Vector b(n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          const double expected = j >= i ? taylor_coefficient(0.25, static_cast<int>(j - i)) : 0.0;
          a(i, j) = expected;
          CHECK(std::abs(sys.a(i, j) - expected) <= 1e-12 * std::abs(expected));
        }
        b[i] = taylor_coefficient(0.25, static_cast<int>(n - i));
        CHECK(std::abs(sys.b(i) - b[i]) <= 1e-12 * std::abs(b[i]));
      }
      // The banded drift agrees with dense A x + B u.
      const Vector x = testing::random_points(n, 1, 3).col(0);
      const Vector u = Vector::Constant(1, 0.7);
      Rng rng(0);
      const Vector dense = a * x + b * u[0];
      Vector banded(n);
      sys.drift(as_span(x), as_span(u), {banded.data(), static_cast<std::size_t>(n)});
      CHECK((banded - dense).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }

  TEST_CASE("10000-dimensional integrator stays finite and banded") {
    IntegratorChain sys(10000, 0.25, GaussianIid{Vector::Constant(1, 0.01)});
    CHECK(sys.band() < 200);
    CHECK(sys.a(0, 9999) == 0.0);
    CHECK(sys.b(0) == 0.0);
    CHECK(sys.b(9999) == 0.25);
    CHECK(std::isfinite(sys.a(10, 10 + sys.band() - 1)));
    Rng rng(2);
    const Vector x = Vector::Ones(10000);
    const Vector y = step_once(sys, x, Vector::Zero(1), rng);
    CHECK(y.allFinite());
  }

  TEST_CASE("Gaussian disturbance moments") {
    IntegratorChain sys(3, 0.25, GaussianIid{vec({0.01, 0.04, 0.0025})});
    Rng rng(42);
    const int draws = 100000;
    Vector sum = Vector::Zero(3);
    Vector sq = Vector::Zero(3);
    const Vector zero = Vector::Zero(3);
    IntegratorChain quiet(3, 0.25, NoDisturbance{});
    for (int i = 0; i < draws; ++i) {
      const Vector w = step_once(sys, zero, Vector::Zero(1), rng);
      sum += w;
      sq += w.cwiseProduct(w);
    }
    const Vector mean = sum / draws;
    const Vector var = sq / draws - mean.cwiseProduct(mean);
    const Vector sd = vec({0.1, 0.2, 0.05});
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(mean[i]) <= 4.0 * sd[i] / std::sqrt(draws));
      CHECK(std::abs(var[i] / (sd[i] * sd[i]) - 1.0) <= 0.10);
    }
  }

  TEST_CASE("Beta disturbance mean and distribution") {
    IntegratorChain sys(2, 0.25, BetaIid{0.5, 0.5, false});
    Rng rng(7);
    const int draws = 100000;
    std::vector<double> first;
    Vector sum = Vector::Zero(2);
    for (int i = 0; i < draws; ++i) {
      const Vector w = step_once(sys, Vector::Zero(2), Vector::Zero(1), rng);
      sum += w;
      first.push_back(w[0]);
      CHECK_FALSE((w[0] < 0.0 || w[0] > 1.0));
    }
    CHECK(std::abs(sum[0] / draws - 0.5) <= 0.01);
    CHECK(std::abs(sum[1] / draws - 0.5) <= 0.01);

    // Kolmogorov-Smirnov against the arcsine CDF (2/pi) asin(sqrt(x)).
    std::sort(first.begin(), first.end());
    double ks = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double cdf = 2.0 / std::numbers::pi * std::asin(std::sqrt(first[static_cast<std::size_t>(i)]));
      ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / draws), std::abs(cdf - static_cast<double>(i + 1) / draws)});
    }
    MESSAGE("KS statistic: " << ks);
    CHECK(ks <= 0.01);

    IntegratorChain centered(2, 0.25, BetaIid{0.5, 0.5, true});
    Vector csum = Vector::Zero(2);
    for (int i = 0; i < 20000; ++i) csum += step_once(centered, Vector::Zero(2), Vector::Zero(1), rng);
    CHECK(std::abs(csum[0] / 20000) <= 0.01);
  }

  TEST_CASE("disturbance validation") {
    CHECK_THROWS_AS(IntegratorChain(2, 0.25, GaussianIid{vec({0.01, -0.01})}), InputError);
    CHECK_THROWS_AS(IntegratorChain(2, 0.25, GaussianIid{vec({0.01, 0.01, 0.01})}), InputError);
    CHECK_THROWS_AS(IntegratorChain(2, 0.25, BetaIid{0.0, 0.5, false}), InputError);
    CHECK_THROWS_AS(IntegratorChain(0, 0.25, NoDisturbance{}), InputError);
    CHECK_THROWS_AS(IntegratorChain(2, 0.0, NoDisturbance{}), InputError);
    IntegratorChain sys(2, 0.25, NoDisturbance{});
    Rng rng(1);
    CHECK_THROWS_AS(step_once(sys, Vector::Zero(3), Vector::Zero(1), rng), InputError);
    CHECK_THROWS_AS(step_once(sys, Vector::Zero(2), Vector::Zero(2), rng), InputError);
  }

  TEST_CASE("sample generation") {
    IntegratorChain sys(2, 0.25, GaussianIid{Vector::Constant(1, 0.01)});
    const auto sampler = uniform_box_sampler(Box::cube(2, -1.1, 1.1));
    const SampleSet s = generate_samples(sys, constant_policy(Vector::Zero(1)), 1024, sampler, 3);
    CHECK(s.size() == 1024);
    CHECK(s.controls.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.states.cwiseAbs().maxCoeff() <= 1.1);
    CHECK(s.seed == 3);
    CHECK(s.system == "integrator");

    const SampleSet again = generate_samples(sys, constant_policy(Vector::Zero(1)), 1024, sampler, 3);
    CHECK(s.states == again.states);
    CHECK(s.successors == again.successors);
    const SampleSet other = generate_samples(sys, constant_policy(Vector::Zero(1)), 1024, sampler, 4);
    CHECK(s.states != other.states);

    SampleSet serial;
    {
      testing::EnvGuard guard("RKHS_REACH_THREADS", "1");
      serial = generate_samples(sys, constant_policy(Vector::Zero(1)), 1024, sampler, 3);
    }
    CHECK(serial.successors == s.successors);
    CHECK_THROWS_AS(generate_samples(sys, constant_policy(Vector::Zero(1)), 0, sampler, 3), InputError);
  }

  TEST_CASE("Beta sample generation mean") {
    IntegratorChain sys(2, 0.25, BetaIid{});
    const SampleSet s = generate_samples(sys, constant_policy(Vector::Zero(1)), 100000,
                                         uniform_box_sampler(Box::cube(2, 0.0, 0.0)), 9);
    const Vector mean = s.successors.colwise().mean().transpose();
    CHECK(std::abs(mean[0] - 0.5) <= 0.01);
    CHECK(std::abs(mean[1] - 0.5) <= 0.01);
  }

  TEST_CASE("random streams are reproducible and distinct") {
    Rng a = Rng::stream(5, 0);
    Rng b = Rng::stream(5, 0);
    Rng c = Rng::stream(5, 1);
    Rng d = Rng::stream(6, 0);
    const double va = a.uniform(0, 1);
    CHECK(va == b.uniform(0, 1));
    CHECK(va != c.uniform(0, 1));
    CHECK(va != d.uniform(0, 1));
  }

  TEST_CASE("CWH discretization matches the matrix exponential") {
    const CwhSystem sys;
    const double t = sys.parameters().sampling_time_s;
    Eigen::Matrix<double, 6, 6> aug = Eigen::Matrix<double, 6, 6>::Zero();
    aug.topLeftCorner<4, 4>() = sys.continuous_a() * t;
    aug.topRightCorner<4, 2>() = sys.continuous_b() * t;
    const Eigen::Matrix<double, 6, 6> expm = aug.exp();
    CHECK((expm.topLeftCorner<4, 4>() - sys.a()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((expm.topRightCorner<4, 2>() - sys.b()).cwiseAbs().maxCoeff() <= 1e-10);

    const CwhSystem other(CwhParameters{500.0, 50.0, 7.0});
    aug.topLeftCorner<4, 4>() = other.continuous_a() * 7.0;
    aug.topRightCorner<4, 2>() = other.continuous_b() * 7.0;
    const Eigen::Matrix<double, 6, 6> expm2 = aug.exp();
    CHECK((expm2.topLeftCorner<4, 4>() - other.a()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((expm2.topRightCorner<4, 2>() - other.b()).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("CWH orbital rate and continuous model") {
    const double r = 6378.137 + 850.0;
    CHECK(orbital_rate(850.0) == doctest::Approx(std::sqrt(398600.4418 / (r * r * r))).epsilon(1e-14));
    const CwhSystem sys;
    CHECK(sys.omega() == doctest::Approx(1.0274e-3).epsilon(1e-3));
    const Eigen::Matrix4d ac = sys.continuous_a();
    CHECK(ac(2, 0) == doctest::Approx(3.0 * sys.omega() * sys.omega()));
    CHECK(ac(2, 3) == doctest::Approx(2.0 * sys.omega()));
    CHECK(ac(3, 2) == doctest::Approx(-2.0 * sys.omega()));
    CHECK(sys.control_bounds().has_value());
  }

  TEST_CASE("CWH sets") {
    const CwhSets sets = cwh_sets();
    const Vector dock = vec({0.0, -0.05, 0.0, 0.0});
    CHECK(sets.target(as_span(dock)));
    CHECK(sets.safe(as_span(dock)));
    const Vector off_cone = vec({0.2, -0.1, 0.0, 0.0});
    CHECK_FALSE(sets.safe(as_span(off_cone)));
    const Vector edge = vec({0.0, -0.1, 0.0, 0.0});
    CHECK_FALSE(sets.target(as_span(edge)));
    const Vector fast = vec({0.0, -0.05, 0.02, 0.0});
    CHECK_FALSE(sets.target(as_span(fast)));
    CHECK(sets.safe(as_span(fast)));
    const Vector too_fast = vec({0.0, -0.3, 0.0, 0.06});
    CHECK_FALSE(sets.safe(as_span(too_fast)));
  }

  TEST_CASE("CWH docking policy saturates and drives toward the reference") {
    const CwhSystem sys;
    const FixedPolicy pol = cwh_docking_policy(sys);
    Vector u(2);
    const Vector far = vec({0.0, -5.0, 0.0, 0.0});
    pol.map(0, as_span(far), {u.data(), 2});
    CHECK(u[1] == doctest::Approx(0.1));
    const Vector at_ref = vec({0.0, -0.05, 0.0, 0.0});
    pol.map(0, as_span(at_ref), {u.data(), 2});
    CHECK(u.cwiseAbs().maxCoeff() <= 1e-15);

    // Closed loop without noise approaches the reference.
    Vector z = vec({0.1, -0.4, 0.0, 0.0});
    for (int k = 0; k < 40; ++k) {
      pol.map(k, as_span(z), {u.data(), 2});
      Vector next(4);
      sys.drift(as_span(z), as_span(u), {next.data(), 4});
      z = next;
    }
    CHECK(std::abs(z[0]) < 0.02);
    CHECK(std::abs(z[1] + 0.05) < 0.02);
  }

  TEST_CASE("closed-loop sampler keeps the initial-state box at zero steps") {
    const CwhSystem sys;
    Box box = Box::cube(4, 0.0, 0.0);
    box.lower.head(2) << -0.3, -0.5;
    box.upper.head(2) << 0.3, 0.1;
    const auto sampler = closed_loop_sampler(sys, cwh_docking_policy(sys), uniform_box_sampler(box), 4);
    const SampleSet s = generate_samples(sys, cwh_docking_policy(sys), 300, sampler, 1);
    CHECK(s.states.col(2).cwiseAbs().maxCoeff() > 0.0);  // some samples were advanced
    CHECK(s.controls.cwiseAbs().maxCoeff() <= 0.1);
    const auto still = closed_loop_sampler(sys, cwh_docking_policy(sys), uniform_box_sampler(box), 0);
    const SampleSet s0 = generate_samples(sys, cwh_docking_policy(sys), 100, still, 1);
    CHECK(s0.states.col(2).cwiseAbs().maxCoeff() == 0.0);
  }
}
