// Copyright 2026 The wass-smooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ws = wass_smooth;

namespace {

double tol(const ws::Matrix &exact) {
  return std::max(1e-6, 1e-4 * exact.cwiseAbs().maxCoeff());
}

class ZooOracle : public ::testing::TestWithParam<std::string> {};

TEST_P(ZooOracle, DeclaredDerivativesMatchParticleFiniteDifferences) {
  const auto u = ws::make_zoo_functional(GetParam(), 2);
  ASSERT_TRUE(u.has_lions_grad());
  ASSERT_TRUE(u.has_second_derivatives());
  ws::PhiloxEngine e(ws::RngStream{41, 0});
  for (int probe = 0; probe < 50; ++probe) {
    const auto n = 1 + static_cast<Eigen::Index>(e.below(16));
    const auto mu = ws::testing::random_cloud(e, 2, n, 1.0, 0.5);
    const double nd = static_cast<double>(n);
    const auto fd = ws::particle_fd_gradient(u, mu);
    ASSERT_EQ(fd.per_particle.size(), static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const ws::Vector exact = u.lions_grad(mu, mu.point(i)) / nd;
      EXPECT_LT((fd.per_particle[static_cast<std::size_t>(i)] - exact).cwiseAbs().maxCoeff(),
                tol(exact));
    }
    const auto i = static_cast<Eigen::Index>(e.below(static_cast<std::uint64_t>(n)));
    const auto j = static_cast<Eigen::Index>(e.below(static_cast<std::uint64_t>(n)));
    ws::Matrix exact = u.lions_hess_mu(mu, mu.point(i), mu.point(j)) / (nd * nd);
    if (i == j) {
      exact += u.lions_hess_x(mu, mu.point(i)) / nd;
    }
    EXPECT_LT((ws::particle_fd_hessian_block(u, mu, i, j) - exact).cwiseAbs().maxCoeff(),
              tol(exact));
  }
}

INSTANTIATE_TEST_SUITE_P(Cylindrical, ZooOracle,
                         ::testing::Values("constant", "linear_x1", "linear_sin",
                                           "second_moment", "quadratic_mean"));

TEST(Zoo, ConstantFunctional) {
  const auto u = ws::make_zoo_functional("constant", 2);
  const auto mu = ws::dirac(ws::Vector::Ones(2));
  EXPECT_EQ(u(mu), 1.0);
  EXPECT_EQ(u.lions_grad(mu, ws::Vector::Ones(2)), ws::Vector::Zero(2));
  EXPECT_EQ((*u.modulus)(5.0), 0.0);
}

TEST(Zoo, LinearFirstCoordinate) {
  const auto u = ws::make_zoo_functional("linear_x1", 2);
  ws::Matrix pts(2, 2);
  pts << 1.0, 3.0,
         5.0, -5.0;
  ws::Vector w(2);
  w << 0.25, 0.75;
  const ws::DiscreteMeasure mu(pts, w);
  EXPECT_DOUBLE_EQ(u(mu), 2.5);
  EXPECT_EQ(u.lions_grad(mu, ws::Vector::Constant(2, 7.0)), (ws::Vector(2) << 1.0, 0.0).finished());
  EXPECT_EQ(*u.lipschitz_const, 1.0);
  EXPECT_EQ((*u.modulus)(0.3), 0.3);
}

TEST(Zoo, QuadraticMeanClosedForms) {
  const auto u = ws::make_zoo_functional("quadratic_mean", 1);
  EXPECT_EQ(u(ws::dirac(ws::Vector::Zero(1))), 0.0);
  EXPECT_EQ(u.lions_grad(ws::dirac(ws::Vector::Zero(1)), ws::Vector::Ones(1))(0), 0.0);
  ws::Matrix pts(1, 2);
  pts << 0.0, 2.0;
  const auto mu = ws::DiscreteMeasure::uniform(pts);
  EXPECT_DOUBLE_EQ(u(mu), 1.0);
  EXPECT_DOUBLE_EQ(u.lions_grad(mu, ws::Vector::Zero(1))(0), 2.0);
  EXPECT_DOUBLE_EQ(u.lions_hess_mu(mu, ws::Vector::Zero(1), ws::Vector::Ones(1))(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(u.lions_hess_x(mu, ws::Vector::Zero(1))(0, 0), 0.0);
  ASSERT_TRUE(u.modulus.has_value());
  EXPECT_FALSE(u.modulus->is_global());
  EXPECT_EQ(u.modulus->valid_radius(), ws::kDefaultModulusRadius);
  EXPECT_FALSE(u.lipschitz_const.has_value());
}

TEST(Zoo, W2AnchorHasNoDerivatives) {
  const auto u = ws::make_zoo_functional("w2_anchor", 2);
  EXPECT_FALSE(u.has_lions_grad());
  EXPECT_EQ(*u.lipschitz_const, 1.0);
  // W2(delta_0, uniform on {+-e1, +-e2}) = 1.
  EXPECT_NEAR(u(ws::dirac(ws::Vector::Zero(2))), 1.0, 1e-14);
  EXPECT_NEAR(u(ws::default_anchor(2)), 0.0, 1e-14);
}

TEST(Zoo, W2AnchorIsOneLipschitz) {
  const auto u = ws::make_zoo_functional("w2_anchor", 2);
  ws::PhiloxEngine e(ws::RngStream{42, 0});
  for (int i = 0; i < 50; ++i) {
    const auto mu = ws::testing::random_cloud(e, 2, 6);
    const auto nu = ws::testing::random_cloud(e, 2, 6, 2.0, 0.5);
    EXPECT_LE(std::abs(u(mu) - u(nu)), ws::w2_exact(mu, nu).distance + 1e-10);
  }
}

TEST(Zoo, SecondMomentHasNoModulus) {
  const auto u = ws::make_zoo_functional("second_moment", 3);
  EXPECT_FALSE(u.modulus.has_value());
  EXPECT_DOUBLE_EQ(u(ws::dirac(ws::Vector::Constant(3, 2.0))), 12.0);
}

TEST(Zoo, RegistryResolvesEveryName) {
  for (const auto &name : ws::zoo_names()) {
    EXPECT_TRUE(ws::is_zoo_name(name));
    EXPECT_EQ(ws::make_zoo_functional(name, 2).name, name);
  }
  EXPECT_FALSE(ws::is_zoo_name("lineer"));
  EXPECT_THROW(ws::make_zoo_functional("lineer", 2), ws::InvalidInput);
}

TEST(Modulus, Shapes) {
  const auto lin = ws::ModulusOfContinuity::linear(2.0);
  EXPECT_EQ(lin(0.0), 0.0);
  EXPECT_EQ(lin(1.5), 3.0);
  EXPECT_TRUE(lin.is_global());
  const auto hoelder = ws::ModulusOfContinuity::hoelder(0.5, 3.0);
  EXPECT_DOUBLE_EQ(hoelder(4.0), 6.0);
  const auto capped = ws::ModulusOfContinuity::capped_linear(2.0, 1.0);
  EXPECT_EQ(capped(0.25), 0.5);
  EXPECT_EQ(capped(10.0), 1.0);
  EXPECT_THROW(ws::ModulusOfContinuity::hoelder(1.5, 1.0), ws::InvalidInput);
  EXPECT_THROW(ws::ModulusOfContinuity::linear(-1.0), ws::InvalidInput);
  // Concave and non-decreasing on a grid.
  for (double t = 0.0; t < 5.0; t += 0.1) {
    for (const auto &w : {lin, hoelder, capped}) {
      EXPECT_LE(w(t), w(t + 0.1));
      EXPECT_GE(w(t + 0.1) - w(t) + 1e-12, w(t + 0.2) - w(t + 0.1));
    }
  }
}

TEST(Cylindrical, BuildsExactDerivatives) {
  // u(mu) = (int x1)(int x2^2): a product of moments.
  ws::CylindricalFunctional cyl;
  cyl.outer = {[](const ws::Vector &m) { return m(0) * m(1); },
               [](const ws::Vector &m) { return ws::Vector((ws::Vector(2) << m(1), m(0)).finished()); },
               [](const ws::Vector &) {
                 return ws::Matrix((ws::Matrix(2, 2) << 0.0, 1.0, 1.0, 0.0).finished());
               }};
  cyl.inner_tests.push_back(ws::first_coordinate());
  cyl.inner_tests.push_back({[](const ws::Vector &x) { return x(1) * x(1); },
                             [](const ws::Vector &x) {
                               return ws::Vector((ws::Vector(2) << 0.0, 2.0 * x(1)).finished());
                             },
                             [](const ws::Vector &) {
                               return ws::Matrix((ws::Matrix(2, 2) << 0, 0, 0, 2).finished());
                             }});
  const auto u = cyl.build("product");
  ws::PhiloxEngine e(ws::RngStream{43, 0});
  const auto mu = ws::testing::random_cloud(e, 2, 5);
  const auto fd = ws::particle_fd_gradient(u, mu);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const ws::Vector exact = u.lions_grad(mu, mu.point(i)) / 5.0;
    EXPECT_LT((fd.per_particle[static_cast<std::size_t>(i)] - exact).cwiseAbs().maxCoeff(),
              tol(exact));
  }
  const ws::Matrix block = ws::particle_fd_hessian_block(u, mu, 1, 3);
  const ws::Matrix exact = u.lions_hess_mu(mu, mu.point(1), mu.point(3)) / 25.0;
  EXPECT_LT((block - exact).cwiseAbs().maxCoeff(), tol(exact));
}

}  // namespace
