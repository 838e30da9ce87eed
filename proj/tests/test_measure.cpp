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
#include <limits>

namespace ws = wass_smooth;

namespace {

ws::Matrix two_points() {
  ws::Matrix pts(2, 2);
  pts << 0.0, 1.0,
         0.0, 2.0;
  return pts;
}

TEST(DiscreteMeasure, AcceptsValidInput) {
  const ws::DiscreteMeasure mu(two_points(), ws::Vector::Constant(2, 0.5));
  EXPECT_EQ(mu.dim(), 2);
  EXPECT_EQ(mu.size(), 2);
  EXPECT_TRUE(mu.has_uniform_weights());
  EXPECT_DOUBLE_EQ(mu.mean()(0), 0.5);
  EXPECT_DOUBLE_EQ(mu.mean()(1), 1.0);
}

TEST(DiscreteMeasure, RejectsBadWeights) {
  EXPECT_THROW(ws::DiscreteMeasure(two_points(), ws::Vector::Constant(2, 0.6)), ws::InvalidInput);
  ws::Vector negative(2);
  negative << 1.5, -0.5;
  EXPECT_THROW(ws::DiscreteMeasure(two_points(), negative), ws::InvalidInput);
  ws::Vector nan(2);
  nan << std::nan(""), 0.5;
  EXPECT_THROW(ws::DiscreteMeasure(two_points(), nan), ws::InvalidInput);
  EXPECT_THROW(ws::DiscreteMeasure(two_points(), ws::Vector::Constant(3, 1.0 / 3)),
               ws::InvalidInput);
  // Off by more than the 1e-12 tolerance.
  ws::Vector off(2);
  off << 0.5, 0.5 + 1e-9;
  EXPECT_THROW(ws::DiscreteMeasure(two_points(), off), ws::InvalidInput);
}

TEST(DiscreteMeasure, KeepsWeightsWithinToleranceUnchanged) {
  ws::Vector w(2);
  w << 0.5, 0.5 - 1e-13;
  const ws::DiscreteMeasure mu(two_points(), w);
  EXPECT_EQ(mu.weight(1), 0.5 - 1e-13);
}

TEST(DiscreteMeasure, RejectsBadPoints) {
  ws::Matrix pts = two_points();
  pts(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ws::DiscreteMeasure::uniform(pts), ws::InvalidInput);
  EXPECT_THROW(ws::DiscreteMeasure::uniform(ws::Matrix(2, 0)), ws::InvalidInput);
  EXPECT_THROW(ws::DiscreteMeasure::uniform(ws::Matrix(0, 3)), ws::InvalidInput);
}

TEST(DiscreteMeasure, DiracAndSecondMoment) {
  const ws::Vector x = (ws::Vector(2) << 3.0, 4.0).finished();
  const auto d = ws::dirac(x);
  EXPECT_EQ(d.size(), 1);
  EXPECT_DOUBLE_EQ(ws::second_moment_norm(d), 5.0);
}

TEST(Pushforward, IdentityAndDimensionChecks) {
  const auto mu = ws::DiscreteMeasure::uniform(two_points());
  EXPECT_EQ(ws::pushforward(mu, [](const ws::Vector &x) { return x; }), mu);
  const auto doubled = ws::pushforward(mu, [](const ws::Vector &x) { return ws::Vector(2.0 * x); });
  EXPECT_DOUBLE_EQ(doubled.point(1)(1), 4.0);
  EXPECT_EQ(doubled.weights(), mu.weights());
  int calls = 0;
  EXPECT_THROW(ws::pushforward(mu,
                               [&](const ws::Vector &) {
                                 return ws::Vector(ws::Vector::Zero(++calls == 1 ? 2 : 3));
                               }),
               ws::InvalidInput);
  EXPECT_THROW(ws::pushforward(mu,
                               [](const ws::Vector &x) {
                                 return ws::Vector(x.array() / 0.0);
                               }),
               ws::InvalidInput);
}

TEST(MeasureIo, CsvRoundTripIsExact) {
  ws::PhiloxEngine e(ws::RngStream{5, 0});
  ws::Matrix pts(3, 7);
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    pts.data()[i] = e.normal() * 1e3 + e.uniform() * 1e-7;
  }
  ws::Vector w(7);
  w << 0.1, 0.2, 0.05, 0.15, 0.3, 0.1, 0.1;
  const ws::DiscreteMeasure mu(pts, w / w.sum());
  const auto text = ws::to_csv(mu);
  EXPECT_EQ(text.substr(0, text.find('\n')), "w,x1,x2,x3");
  EXPECT_EQ(ws::from_csv(text), mu);
}

TEST(MeasureIo, JsonRoundTripIsExact) {
  ws::PhiloxEngine e(ws::RngStream{6, 0});
  const auto mu = ws::testing::random_cloud(e, 2, 5);
  EXPECT_EQ(ws::measure_from_json(nlohmann::json::parse(ws::to_json(mu).dump())), mu);
}

TEST(MeasureIo, CsvErrors) {
  EXPECT_THROW(ws::from_csv(""), ws::InvalidInput);
  EXPECT_THROW(ws::from_csv("x,y\n1,2\n"), ws::InvalidInput);
  EXPECT_THROW(ws::from_csv("w,x1\n1,abc\n"), ws::InvalidInput);
  EXPECT_THROW(ws::from_csv("w,x1\n0.5,1\n"), ws::InvalidInput);  // weights sum to 1/2
  EXPECT_THROW(ws::from_csv("w,x1\n1,1,2\n"), ws::InvalidInput);
  EXPECT_EQ(ws::from_csv("w,x1\r\n1,2\r\n").point(0)(0), 2.0);
}

TEST(MeasureIo, ParseMeasureSource) {
  const auto g = ws::parse_measure_source("gaussian:mean=1,2;sd=0.5");
  ASSERT_TRUE(std::holds_alternative<ws::MeasureGenerator>(g));
  EXPECT_EQ(ws::source_dim(g), 2);
  EXPECT_DOUBLE_EQ(std::get<ws::MeasureGenerator>(g).covariance()(0, 0), 0.25);
  const auto d = ws::parse_measure_source("dirac:at=0.5,0,1");
  ASSERT_TRUE(std::holds_alternative<ws::DiscreteMeasure>(d));
  EXPECT_EQ(std::get<ws::DiscreteMeasure>(d).dim(), 3);
  EXPECT_NO_THROW(ws::parse_measure_source("uniform:lo=-1;hi=1"));
  EXPECT_THROW(ws::parse_measure_source("gaussian:mean=1,2"), ws::InvalidInput);
  EXPECT_THROW(ws::parse_measure_source("gaussian:mean=1;sd=1;bogus=2"), ws::InvalidInput);
  EXPECT_THROW(ws::parse_measure_source("/nonexistent/cloud.csv"), ws::InvalidInput);
}

TEST(MeasureGenerator, GaussianMomentsMatch) {
  ws::Matrix cov(2, 2);
  cov << 2.0, 0.6,
         0.6, 0.5;
  const ws::Vector mean = (ws::Vector(2) << 1.0, -1.0).finished();
  const auto gen = ws::MeasureGenerator::gaussian(mean, cov);
  const auto mu = ws::sample_empirical(gen, 100000, ws::RngStream{3, 0});
  EXPECT_NEAR(mu.mean()(0), 1.0, 0.03);
  EXPECT_NEAR(mu.mean()(1), -1.0, 0.03);
  const ws::Matrix centered = mu.points().colwise() - mu.mean();
  const ws::Matrix sample_cov = centered * centered.transpose() / 100000.0;
  EXPECT_LT((sample_cov - cov).cwiseAbs().maxCoeff(), 0.05);
}

TEST(MeasureGenerator, RejectsBadCovariance) {
  ws::Matrix asym(2, 2);
  asym << 1.0, 0.5,
          0.0, 1.0;
  EXPECT_THROW(ws::MeasureGenerator::gaussian(ws::Vector::Zero(2), asym), ws::InvalidInput);
  ws::Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0,
                2.0, 1.0;
  EXPECT_THROW(ws::MeasureGenerator::gaussian(ws::Vector::Zero(2), indefinite), ws::InvalidInput);
  ws::Matrix singular = ws::Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  EXPECT_NO_THROW(ws::MeasureGenerator::gaussian(ws::Vector::Zero(2), singular));
}

TEST(MeasureGenerator, UniformBoxMixtureAndCloud) {
  const ws::Vector lo = (ws::Vector(2) << -1.0, 2.0).finished();
  const ws::Vector hi = (ws::Vector(2) << 1.0, 3.0).finished();
  const auto box = ws::sample_empirical(ws::MeasureGenerator::uniform_box(lo, hi), 2000,
                                        ws::RngStream{4, 0});
  for (Eigen::Index i = 0; i < box.size(); ++i) {
    ASSERT_TRUE((box.point(i).array() >= lo.array()).all());
    ASSERT_TRUE((box.point(i).array() < hi.array()).all());
  }
  const auto left = ws::MeasureGenerator::isotropic_gaussian(ws::Vector::Constant(1, -5.0), 0.1);
  const auto right = ws::MeasureGenerator::isotropic_gaussian(ws::Vector::Constant(1, 5.0), 0.1);
  const auto mix = ws::MeasureGenerator::mixture({left, right}, {0.25, 0.75});
  const auto sample = ws::sample_empirical(mix, 40000, ws::RngStream{4, 1});
  EXPECT_NEAR(sample.mean()(0), 0.25 * -5.0 + 0.75 * 5.0, 0.1);
  EXPECT_THROW(ws::MeasureGenerator::mixture({left}, {0.5}), ws::InvalidInput);

  ws::Vector w(2);
  w << 0.0, 1.0;
  const ws::DiscreteMeasure cloud(two_points(), w);
  const auto draws = ws::sample_empirical(ws::MeasureGenerator::fixed_cloud(cloud), 50,
                                          ws::RngStream{4, 2});
  for (Eigen::Index i = 0; i < draws.size(); ++i) {
    ASSERT_EQ(draws.point(i), cloud.point(1));
  }
}

TEST(MeasureGenerator, SamplingIsDeterministic) {
  const auto gen = ws::MeasureGenerator::isotropic_gaussian(ws::Vector::Zero(3), 1.0);
  EXPECT_EQ(ws::sample_empirical(gen, 10, ws::RngStream{8, 1}),
            ws::sample_empirical(gen, 10, ws::RngStream{8, 1}));
  EXPECT_FALSE(ws::sample_empirical(gen, 10, ws::RngStream{8, 1}) ==
               ws::sample_empirical(gen, 10, ws::RngStream{8, 2}));
}

}  // namespace
