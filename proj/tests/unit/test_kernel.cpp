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

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "rkreach/errors.hpp"
#include "rkreach/kernel.hpp"

using namespace rkreach;

namespace {

// Plain double loop with std::exp; shares no code with the library kernels.
Eigen::MatrixXd loop_gram(double sigma, const Matrix& pts) {
  Eigen::MatrixXd g(pts.rows(), pts.rows());
  for (Index i = 0; i < pts.rows(); ++i) {
    for (Index j = 0; j < pts.rows(); ++j) {
      double d2 = 0.0;
      for (Index c = 0; c < pts.cols(); ++c) d2 += (pts(i, c) - pts(j, c)) * (pts(i, c) - pts(j, c));
      g(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  }
  return g;
}

Vector pt(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("kernel_eval closed-form values") {
    const KernelSpec spec(0.1);
    const Vector a = pt({0.3, -0.7});
    CHECK(kernel_eval(spec, as_span(a), as_span(a)) == 1.0);
    const Vector o = pt({0.0, 0.0});
    const Vector b = pt({0.1, 0.0});
    CHECK(kernel_eval(spec, as_span(o), as_span(b)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(kernel_eval(spec, as_span(o), as_span(b)) == doctest::Approx(0.60653).epsilon(1e-5));

    const Vector ones = Vector::Ones(10000);
    CHECK(kernel_eval(spec, as_span(ones), as_span(ones)) == 1.0);
  }

  TEST_CASE("kernel_eval rejects mismatched dimensions and bad bandwidths") {
    const KernelSpec spec(0.1);
    const Vector a = pt({0.0, 0.0});
    const Vector b = pt({0.0, 0.0, 0.0});
    CHECK_THROWS_AS(kernel_eval(spec, as_span(a), as_span(b)), InputError);
    CHECK_THROWS_AS(KernelSpec(0.0), InputError);
    CHECK_THROWS_AS(KernelSpec(-1.0), InputError);
    CHECK_THROWS_AS(KernelSpec(std::nan("")), InputError);
  }

  TEST_CASE("kernel_eval is symmetric, shift invariant and decreasing in distance") {
    const KernelSpec spec(0.4);
    const Matrix p = testing::random_points(20, 3, 3);
    const Vector c = pt({0.25, -1.5, 3.0});
    for (Index i = 0; i + 1 < p.rows(); ++i) {
      const Vector a = p.row(i).transpose();
      const Vector b = p.row(i + 1).transpose();
      const Vector ac = a + c;
      const Vector bc = b + c;
      CHECK(kernel_eval(spec, as_span(a), as_span(b)) == kernel_eval(spec, as_span(b), as_span(a)));
      CHECK(std::abs(kernel_eval(spec, as_span(ac), as_span(bc)) - kernel_eval(spec, as_span(a), as_span(b))) <= 1e-12);
    }
    const Vector o = Vector::Zero(3);
    double prev = 1.0;
    for (int s = 1; s <= 40; ++s) {
      const Vector q = Vector::Constant(3, 0.02 * s);
      const double k = kernel_eval(spec, as_span(o), as_span(q));
      CHECK(k < prev);
      CHECK(k > 0.0);
      prev = k;
    }
  }

  TEST_CASE("gram small cases") {
    const KernelSpec spec(0.1);
    const Matrix one = testing::random_points(1, 2, 1);
    const GramMatrix g1 = gram(spec, one);
    CHECK(g1.rows() == 1);
    CHECK(g1(0, 0) == 1.0);

    Matrix twin(2, 2);
    twin << 0.4, -0.2, 0.4, -0.2;
    const GramMatrix g2 = gram(spec, twin);
    CHECK(g2 == Eigen::MatrixXd::Ones(2, 2));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g2);
    CHECK(eig.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eig.eigenvalues()[1] == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("gram matches the double-loop reference in both distance forms") {
    for (const Index dim : {Index{2}, Index{20}, Index{300}}) {
      CAPTURE(dim);
      const double sigma = dim == 2 ? 0.1 : 0.5 * std::sqrt(static_cast<double>(dim));
      const Matrix pts = testing::random_points(5, dim, 11 + dim, -0.2, 0.2);
      const GramMatrix g = gram(KernelSpec(sigma), pts);
      CHECK((g - loop_gram(sigma, pts)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("gram is symmetric PSD with unit diagonal") {
    const Matrix pts = testing::random_points(200, 2, 21);
    const GramMatrix g = gram(KernelSpec(0.1), pts);
    CHECK(g == g.transpose());
    CHECK(g.diagonal() == Eigen::VectorXd::Ones(200));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff());
  }

  TEST_CASE("gram columns equal kernel vectors") {
    const KernelSpec spec(0.3);
    for (const Index dim : {Index{2}, Index{24}}) {
      const Matrix pts = testing::random_points(9, dim, 4);
      const GramMatrix g = gram(spec, pts);
      for (Index j = 0; j < pts.rows(); ++j) {
        const Vector kv = kernel_vector(spec, pts, row_span(pts, j));
        CHECK((g.col(j) - kv).cwiseAbs().maxCoeff() <= 1e-14);
      }
    }
  }

  TEST_CASE("kernel_vector examples") {
    const KernelSpec spec(0.1);
    const Matrix pts = testing::random_points(8, 2, 5);
    const Vector hit = kernel_vector(spec, pts, row_span(pts, 3));
    CHECK(hit[3] == 1.0);

    const Vector far = Vector::Constant(2, 100.0);
    const Vector k_far = kernel_vector(spec, pts, as_span(far));
    CHECK(k_far.maxCoeff() <= std::exp(-50.0));

    const Vector q = pt({0.05, -0.02});
    const Vector kv = kernel_vector(spec, pts, as_span(q));
    for (Index i = 0; i < pts.rows(); ++i) {
      const double d2 = (pts.row(i).transpose() - q).squaredNorm();
      CHECK(std::abs(kv[i] - std::exp(-d2 / 0.02)) <= 1e-12);
    }
  }

  TEST_CASE("cross_kernel rows equal kernel vectors") {
    const KernelSpec spec(0.2);
    const Matrix pts = testing::random_points(30, 3, 6);
    const Matrix qs = testing::random_points(7, 3, 7);
    const Matrix k = cross_kernel(spec, qs, pts);
    for (Index q = 0; q < qs.rows(); ++q) {
      const Vector kv = kernel_vector(spec, pts, row_span(qs, q));
      CHECK((k.row(q).transpose() - kv).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("invalid point sets are rejected") {
    const KernelSpec spec(0.1);
    CHECK_THROWS_AS(gram(spec, Matrix(0, 2)), InputError);
    Matrix bad = testing::random_points(3, 2, 1);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(gram(spec, bad), InputError);
    const Matrix pts = testing::random_points(3, 2, 1);
    const Vector q3 = Vector::Zero(3);
    CHECK_THROWS_AS(kernel_vector(spec, pts, as_span(q3)), InputError);
    CHECK_THROWS_AS(cross_kernel(spec, testing::random_points(2, 3, 1), pts), InputError);
  }

  TEST_CASE("gram is identical for any worker count") {
    const Matrix pts = testing::random_points(150, 5, 8);
    GramMatrix serial, parallel;
    {
      testing::EnvGuard guard("RKHS_REACH_THREADS", "1");
      serial = gram(KernelSpec(0.5), pts);
    }
    {
      testing::EnvGuard guard("RKHS_REACH_THREADS", "5");
      parallel = gram(KernelSpec(0.5), pts);
    }
    CHECK(serial == parallel);
  }
}
