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
using ws::testing::brute_force_w2;
using ws::testing::random_cloud;

namespace {

TEST(W2Exact, DiracsGiveEuclideanDistance) {
  const ws::Vector x = (ws::Vector(3) << 1.0, 2.0, 3.0).finished();
  const ws::Vector y = (ws::Vector(3) << -1.0, 0.5, 3.0).finished();
  EXPECT_NEAR(ws::w2_exact(ws::dirac(x), ws::dirac(y)).distance, (x - y).norm(), 1e-14);
}

TEST(W2Exact, MatchesBruteForceOnSmallUniformPairs) {
  ws::PhiloxEngine e(ws::RngStream{21, 0});
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(e.below(6));
    const auto d = 1 + static_cast<Eigen::Index>(e.below(3));
    const auto mu = random_cloud(e, d, n);
    const auto nu = random_cloud(e, d, n, 1.5, 0.3);
    const auto r = ws::w2_exact(mu, nu);
    EXPECT_EQ(r.solver, ws::Solver::assignment);
    EXPECT_NEAR(r.distance, brute_force_w2(mu, nu), 1e-10);
    EXPECT_LE(r.plan.marginal_violation(), 1e-15);
    EXPECT_LE(r.certified_gap, 1e-10);
  }
}

TEST(W2Exact, GeneralWeightsMatchExpandedAssignment) {
  // Weights that are multiples of 1/12: splitting atoms turns the problem
  // into an equal-weight assignment with the same optimal cost.
  ws::PhiloxEngine e(ws::RngStream{22, 0});
  const int copies = 12;
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = 1 + static_cast<Eigen::Index>(e.below(3));
    auto random_weights = [&](Eigen::Index count) {
      std::vector<int> units(static_cast<std::size_t>(count), 1);
      for (int extra = 0; extra < copies - count; ++extra) {
        ++units[e.below(static_cast<std::uint64_t>(count))];
      }
      ws::Vector w(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        w(i) = units[static_cast<std::size_t>(i)] / static_cast<double>(copies);
      }
      return ws::Vector(w / w.sum());
    };
    const auto n = 2 + static_cast<Eigen::Index>(e.below(4));
    const auto m = 2 + static_cast<Eigen::Index>(e.below(5));
    const ws::DiscreteMeasure mu(random_cloud(e, d, n).points(), random_weights(n));
    const ws::DiscreteMeasure nu(random_cloud(e, d, m, 1.0, 0.5).points(), random_weights(m));
    const auto r = ws::w2_exact(mu, nu);
    EXPECT_EQ(r.solver, ws::Solver::min_cost_flow);
    const auto big_mu = ws::testing::expand_rational(mu, copies);
    const auto big_nu = ws::testing::expand_rational(nu, copies);
    ASSERT_EQ(big_mu.size(), copies);
    ASSERT_EQ(big_nu.size(), copies);
    EXPECT_NEAR(r.distance, ws::w2_exact(big_mu, big_nu).distance, 1e-10);
    EXPECT_LE(r.plan.marginal_violation(), 1e-12);
    EXPECT_LE(r.certified_gap, 1e-10);
    EXPECT_GE(r.plan.matrix.minCoeff(), 0.0);
  }
}

TEST(W2Exact, ZeroWeightAtomsAreIgnored) {
  ws::Matrix pts(1, 3);
  pts << 0.0, 100.0, 1.0;
  ws::Vector w(3);
  w << 0.5, 0.0, 0.5;
  const ws::DiscreteMeasure mu(pts, w);
  ws::Matrix qts(1, 2);
  qts << 0.0, 1.0;
  EXPECT_NEAR(ws::w2_exact(mu, ws::DiscreteMeasure::uniform(qts)).distance, 0.0, 1e-12);
}

TEST(W2Exact, MetricAxioms) {
  ws::PhiloxEngine e(ws::RngStream{23, 0});
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = 1 + static_cast<Eigen::Index>(e.below(3));
    const auto a = random_cloud(e, d, 1 + static_cast<Eigen::Index>(e.below(12)));
    const auto b = random_cloud(e, d, 1 + static_cast<Eigen::Index>(e.below(12)), 2.0);
    const auto c = random_cloud(e, d, 1 + static_cast<Eigen::Index>(e.below(12)), 0.5, 1.0);
    const double ab = ws::w2_exact(a, b).distance;
    EXPECT_NEAR(ab, ws::w2_exact(b, a).distance, 1e-10);
    EXPECT_EQ(ws::w2_exact(a, a).distance, 0.0);
    EXPECT_GE(ws::w2_exact(a, c).distance + ws::w2_exact(c, b).distance - ab, -1e-9);
  }
}

TEST(W2Exact, TranslationCostsTheShift) {
  ws::PhiloxEngine e(ws::RngStream{24, 0});
  const auto mu = random_cloud(e, 2, 9);
  const ws::Vector shift = (ws::Vector(2) << 0.7, -0.2).finished();
  const ws::DiscreteMeasure moved(mu.points().colwise() + shift, mu.weights());
  EXPECT_NEAR(ws::w2_exact(mu, moved).distance, shift.norm(), 1e-12);
}

TEST(W2Exact, DimensionMismatchThrows) {
  EXPECT_THROW(ws::w2_exact(ws::dirac(ws::Vector::Zero(2)), ws::dirac(ws::Vector::Zero(3))),
               ws::InvalidInput);
}

TEST(W2Sorted1d, AgreesWithExact) {
  ws::PhiloxEngine e(ws::RngStream{25, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(e.below(40));
    const auto mu = random_cloud(e, 1, n);
    const auto nu = random_cloud(e, 1, n, 3.0, 1.0);
    EXPECT_NEAR(ws::w2_sorted_1d(mu, nu).distance, ws::w2_exact(mu, nu).distance, 1e-10);
  }
  EXPECT_THROW(ws::w2_sorted_1d(random_cloud(e, 2, 3), random_cloud(e, 2, 3)), ws::InvalidInput);
  EXPECT_THROW(ws::w2_sorted_1d(random_cloud(e, 1, 3), random_cloud(e, 1, 4)), ws::InvalidInput);
}

TEST(W2Sinkhorn, UpperBoundsExactAndTightensWithEpsilon) {
  ws::PhiloxEngine e(ws::RngStream{26, 0});
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = random_cloud(e, 2, 8);
    const auto nu = random_cloud(e, 2, 11, 1.2, 0.4);
    const double exact = ws::w2_exact(mu, nu).distance;
    const auto coarse = ws::w2_sinkhorn(mu, nu, 1e-1, 100000);
    const auto fine = ws::w2_sinkhorn(mu, nu, 1e-3, 100000);
    EXPECT_GE(coarse.distance, exact - 1e-12);
    EXPECT_GE(fine.distance, exact - 1e-12);
    EXPECT_LE(fine.distance * fine.distance - exact * exact, fine.certified_gap + 1e-12);
    EXPECT_LE(fine.distance - exact, 0.05);
    EXPECT_LE(fine.plan.marginal_violation(), 1e-12);
    EXPECT_EQ(fine.status, ws::SolverStatus::converged);
  }
}

TEST(W2Sinkhorn, ExhaustedBudgetIsReportedNotThrown) {
  ws::PhiloxEngine e(ws::RngStream{27, 0});
  const auto mu = random_cloud(e, 2, 10);
  const auto nu = random_cloud(e, 2, 10, 3.0);
  const auto r = ws::w2_sinkhorn(mu, nu, 1e-4, 2);
  EXPECT_EQ(r.status, ws::SolverStatus::not_converged);
  EXPECT_GT(r.marginal_residual, 0.0);
  EXPECT_LE(r.iterations, 2);
  EXPECT_GE(r.distance, ws::w2_exact(mu, nu).distance - 1e-12);
  EXPECT_THROW(ws::w2_sinkhorn(mu, nu, 0.0, 10), ws::InvalidInput);
  EXPECT_THROW(ws::w2_sinkhorn(mu, nu, 1e-2, 0), ws::InvalidInput);
}

TEST(PairedIndexBound, DominatesW2) {
  ws::PhiloxEngine e(ws::RngStream{28, 0});
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(e.below(8));
    const auto xs = random_cloud(e, 2, n);
    const auto ys = random_cloud(e, 2, n, 1.0, 0.5);
    EXPECT_GE(ws::paired_index_bound(xs.points(), ys.points()),
              ws::w2_exact(xs, ys).distance - 1e-10);
  }
}

TEST(PairedIndexBound, ShapeErrors) {
  EXPECT_THROW(ws::paired_index_bound(ws::Matrix::Zero(2, 3), ws::Matrix::Zero(2, 4)),
               ws::InvalidInput);
  EXPECT_THROW(ws::paired_index_bound(ws::Matrix::Zero(2, 3), ws::Matrix::Zero(3, 3)),
               ws::InvalidInput);
  EXPECT_THROW(ws::coupling_upper_bound(ws::Matrix::Zero(1, 0), ws::Matrix::Zero(1, 0)),
               ws::InvalidInput);
}

TEST(PairedIndexBound, RepeatedPointsUseTheIndexPairing) {
  // x = {0, 0}, y = {0, 2}: pairing by index costs sqrt(2); so does W2.
  ws::Matrix xs = ws::Matrix::Zero(1, 2);
  ws::Matrix ys(1, 2);
  ys << 0.0, 2.0;
  EXPECT_DOUBLE_EQ(ws::paired_index_bound(xs, ys), std::sqrt(2.0));
  EXPECT_NEAR(ws::w2_exact(ws::DiscreteMeasure::uniform(xs), ws::DiscreteMeasure::uniform(ys))
                  .distance,
              std::sqrt(2.0), 1e-14);
}

TEST(CouplingUpperBound, IndependentCouplingOfDiracs) {
  ws::Matrix xi = ws::Matrix::Constant(2, 4, 1.0);
  ws::Matrix eta = ws::Matrix::Constant(2, 4, -1.0);
  EXPECT_DOUBLE_EQ(ws::coupling_upper_bound(xi, eta), std::sqrt(8.0));
}

}  // namespace
