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

#include "helpers.hpp"
#include "rkreach/errors.hpp"
#include "rkreach/oracle.hpp"

using namespace rkreach;

namespace {

ReachSpec box_spec(int horizon, double target = 1.0) {
  ReachSpec spec;
  spec.safe = box_predicate(Box::cube(2, -1.0, 1.0));
  spec.target = box_predicate(Box::cube(2, -target, target));
  spec.horizon = horizon;
  spec.policy = constant_policy(Vector::Zero(1));
  return spec;
}

DPGrid split_grid(Index count, int nodes = 20, double target = 1.0) {
  DPGrid grid = DPGrid::uniform(Box::cube(2, -1.1, 1.1), count, nodes);
  grid.add_breakpoints(Box::cube(2, -1.0, 1.0));
  grid.add_breakpoints(Box::cube(2, -target, target));
  return grid;
}

IntegratorChain double_integrator(double variance = 0.01) {
  return IntegratorChain(2, 0.25, GaussianIid{Vector::Constant(1, variance)});
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("Gauss-Legendre rules are exact on polynomials") {
    for (const int n : {1, 2, 5, 20}) {
      const QuadratureRule r = gauss_legendre(n);
      CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
      for (int deg = 0; deg <= 2 * n - 1; ++deg) {
        double integral = 0.0;
        for (Index i = 0; i < r.size(); ++i) integral += r.weights[i] * std::pow(r.nodes[i], deg);
        const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
        CHECK(integral == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
      }
    }
    CHECK_THROWS_AS(gauss_legendre(0), InputError);
  }

  TEST_CASE("truncated Gaussian rule is a probability measure with the right spread") {
    for (const int n : {10, 20, 40}) {
      const QuadratureRule r = truncated_gaussian_rule(0.01, n);
      CHECK(std::abs(r.weights.sum() - 1.0) <= 1e-10);
      CHECK(r.weights.minCoeff() > 0.0);
      CHECK(std::abs(r.weights.dot(r.nodes)) <= 1e-15);
      CHECK(r.weights.dot(r.nodes.cwiseProduct(r.nodes)) == doctest::Approx(0.01).epsilon(2e-3));
      CHECK(r.nodes.cwiseAbs().maxCoeff() <= 0.4);
    }
  }

  TEST_CASE("composite rule splits at cuts and integrates a step exactly") {
    const std::vector<double> cuts{0.05, -2.0};
    const QuadratureRule r = composite_gaussian_rule(0.01, 20, 4.0, cuts);
    CHECK(r.size() == 40);
    CHECK(std::abs(r.weights.sum() - 1.0) <= 1e-10);
    double above = 0.0;
    for (Index i = 0; i < r.size(); ++i) above += r.nodes[i] > 0.05 ? r.weights[i] : 0.0;
    // P(w > 0.05 | |w| < 0.4) for w ~ N(0, 0.01).
    const double tail = 0.5 * std::erfc(0.5 / std::sqrt(2.0)) - 0.5 * std::erfc(4.0 / std::sqrt(2.0));
    CHECK(above == doctest::Approx(tail / std::erf(4.0 / std::sqrt(2.0))).epsilon(1e-10));
    CHECK(composite_gaussian_rule(0.01, 10, 4.0, {}).nodes == truncated_gaussian_rule(0.01, 10).nodes);
  }

  TEST_CASE("bilinear interpolation reproduces affine functions and is zero outside") {
    DPGrid grid = DPGrid::uniform(Box::cube(2, -1.0, 1.0), 11);
    const Matrix nodes = grid.points();
    Vector values(nodes.rows());
    for (Index g = 0; g < nodes.rows(); ++g) values[g] = 2.0 * nodes(g, 0) - nodes(g, 1) + 0.5;
    const Matrix q = testing::random_points(50, 2, 1, -1.0, 1.0);
    for (Index p = 0; p < q.rows(); ++p) {
      const double expected = 2.0 * q(p, 0) - q(p, 1) + 0.5;
      CHECK(interpolate_2d(grid, as_span(values), row_span(q, p)) == doctest::Approx(expected).epsilon(1e-12));
    }
    const Vector outside = Vector::Constant(2, 1.01);
    CHECK(interpolate_2d(grid, as_span(values), as_span(outside)) == 0.0);
  }

  TEST_CASE("DP values vanish outside the safe set") {
    const auto sys = double_integrator();
    const DpSolution dp = dp_value(sys, box_spec(3), split_grid(45));
    const Matrix pts = testing::random_points(100, 2, 2, 1.0001, 1.1);
    const ValueField field = dp.evaluate(pts);
    CHECK(field.values.topRows(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(field.values.minCoeff() >= 0.0);
    CHECK(field.values.maxCoeff() <= 1.0);
  }

  TEST_CASE("zero-variance limit reduces to the deterministic one-step value") {
    const auto sys = double_integrator(1e-12);
    const ReachSpec spec = box_spec(1, 0.5);
    const DpSolution dp = dp_value(sys, spec, split_grid(23, 20, 0.5));
    const Matrix pts = testing::random_points(300, 2, 3, -1.1, 1.1);
    int checked = 0;
    for (Index p = 0; p < pts.rows(); ++p) {
      const auto x = row_span(pts, p);
      const Vector y = (Vector(2) << x[0] + 0.25 * x[1], x[1]).finished();
      // Skip points whose image lies within interpolation reach of the target boundary.
      const double margin = 0.5 - y.cwiseAbs().maxCoeff();
      if (std::abs(margin) < 0.15) continue;
      const double expected = (spec.safe(x) && margin > 0) ? 1.0 : 0.0;
      CHECK(dp.value(0, x) == doctest::Approx(expected).epsilon(1e-9));
      ++checked;
    }
    CHECK(checked > 100);
  }

  TEST_CASE("enlarging the target never lowers a DP value") {
    const auto sys = double_integrator();
    DPGrid grid = split_grid(89);
    grid.add_breakpoints(Box::cube(2, -0.5, 0.5));
    grid.add_breakpoints(Box::cube(2, -0.7, 0.7));
    const DpSolution small = dp_value(sys, box_spec(3, 0.5), grid);
    const DpSolution large = dp_value(sys, box_spec(3, 0.7), grid);
    CHECK((large.continuation() - small.continuation()).minCoeff() >= -1e-12);
    const Matrix pts = grid_points({{-1.1, 1.1, 41}, {-1.1, 1.1, 41}});
    CHECK((large.evaluate(pts).values - small.evaluate(pts).values).minCoeff() >= -1e-12);
  }

  TEST_CASE("doubling the quadrature nodes barely moves the DP solution") {
    const auto sys = double_integrator();
    const DpSolution coarse = dp_value(sys, box_spec(3), split_grid(221, 20));
    const DpSolution fine = dp_value(sys, box_spec(3), split_grid(221, 40));
    const Matrix pts = grid_points({{-1.1, 1.1, 101}, {-1.1, 1.1, 101}});
    const double diff = (coarse.evaluate(pts).values - fine.evaluate(pts).values).cwiseAbs().maxCoeff();
    MESSAGE("quadrature refinement change: " << diff);
    CHECK(diff <= 0.005);
  }

  TEST_CASE("DP and Monte Carlo agree") {
    const auto sys = double_integrator();
    const ReachSpec spec = box_spec(3);
    const DpSolution dp = dp_value(sys, spec, split_grid(221));
    const Matrix pts = testing::random_points(6, 2, 4, -1.0, 1.0);
    for (Index p = 0; p < pts.rows(); ++p) {
      const McEstimate mc = mc_value(sys, spec, row_span(pts, p), 200000, 10 + p);
      const double v = dp.value(0, row_span(pts, p));
      CAPTURE(v);
      CAPTURE(mc.probability);
      CHECK(std::abs(v - mc.probability) <= std::max(0.01, 3.0 * mc.half_width));
    }
  }

  TEST_CASE("Monte Carlo oracle basics") {
    const auto sys = double_integrator();
    const ReachSpec spec = box_spec(3);
    const Vector outside = Vector::Constant(2, 1.5);
    const McEstimate none = mc_value(sys, spec, as_span(outside), 1000, 1);
    CHECK(none.probability == 0.0);
    CHECK(none.half_width == 0.0);

    const IntegratorChain quiet(2, 0.25, NoDisturbance{});
    const exact::DeterministicDynamics f = [&](std::span<const double> x, std::span<const double> u,
                                               std::span<double> out) { quiet.drift(x, u, out); };
    const Matrix pts = testing::random_points(40, 2, 5, -1.2, 1.2);
    for (Index p = 0; p < pts.rows(); ++p) {
      const McEstimate mc = mc_value(quiet, spec, row_span(pts, p), 50, 2);
      CHECK(mc.probability == exact::deterministic_probability(spec, f, row_span(pts, p)));
    }

    const Vector origin = Vector::Zero(2);
    const McEstimate a = mc_value(sys, spec, as_span(origin), 100000, 11);
    const McEstimate b = mc_value(sys, spec, as_span(origin), 100000, 12);
    CHECK(std::abs(a.probability - b.probability) <= 2.0 * (a.half_width + b.half_width));
    CHECK(a.half_width == doctest::Approx(1.96 * std::sqrt(a.probability * (1 - a.probability) / 1e5)));
    CHECK_THROWS_AS(mc_value(sys, spec, as_span(origin), 0, 1), InputError);
  }

  TEST_CASE("Monte Carlo estimates are independent of the worker count") {
    const auto sys = double_integrator();
    const Vector x0 = (Vector(2) << 0.3, -0.2).finished();
    McEstimate serial, parallel;
    {
      testing::EnvGuard guard("RKHS_REACH_THREADS", "1");
      serial = mc_value(sys, box_spec(3), as_span(x0), 50000, 3);
    }
    {
      testing::EnvGuard guard("RKHS_REACH_THREADS", "4");
      parallel = mc_value(sys, box_spec(3), as_span(x0), 50000, 3);
    }
    CHECK(serial.hits == parallel.hits);
  }

  TEST_CASE("DP rejects unsupported systems") {
    const IntegratorChain beta(2, 0.25, BetaIid{});
    CHECK_THROWS_AS(dp_value(beta, box_spec(1), DPGrid::uniform(Box::cube(2, -1.1, 1.1), 11)), ContractError);
    const IntegratorChain triple(3, 0.25, GaussianIid{Vector::Constant(1, 0.01)});
    ReachSpec spec = box_spec(1);
    CHECK_THROWS_AS(dp_value(triple, spec, DPGrid::uniform(Box::cube(3, -1.1, 1.1), 5)), ContractError);
  }
}
