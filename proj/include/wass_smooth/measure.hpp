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

#ifndef WASS_SMOOTH_MEASURE_HPP_
#define WASS_SMOOTH_MEASURE_HPP_

#include <wass_smooth/common.hpp>
#include <wass_smooth/rng.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <variant>
#include <vector>

namespace wass_smooth {

inline constexpr double kWeightSumTolerance = 1e-12;

/*
 * A probability measure on R^d with finitely many atoms. Points are stored
 * column-wise (d x N). Coincident atoms are kept as separate columns.
 *
 * The constructor validates that the weights form a probability vector but
 * never rescales them.
 */
class DiscreteMeasure {
 public:
  DiscreteMeasure(Matrix points, Vector weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    validate();
  }

  /// Equal weights 1/N on the columns of `points`.
  static DiscreteMeasure uniform(Matrix points) {
    const auto n = points.cols();
    if (n < 1) {
      throw InvalidInput("a measure needs at least one atom");
    }
    Vector weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
    return {std::move(points), std::move(weights)};
  }

  Eigen::Index dim() const { return points_.rows(); }
  Eigen::Index size() const { return points_.cols(); }
  const Matrix &points() const { return points_; }
  const Vector &weights() const { return weights_; }
  auto point(Eigen::Index i) const { return points_.col(i); }
  double weight(Eigen::Index i) const { return weights_(i); }

  /// True when every weight equals 1/N up to rounding.
  bool has_uniform_weights() const {
    const double expected = 1.0 / static_cast<double>(size());
    return ((weights_.array() - expected).abs() <= 1e-15).all();
  }

  Vector mean() const { return points_ * weights_; }

  friend bool operator==(const DiscreteMeasure &a, const DiscreteMeasure &b) {
    return a.points_.rows() == b.points_.rows() &&
           a.points_.cols() == b.points_.cols() && a.points_ == b.points_ &&
           a.weights_ == b.weights_;
  }

 private:
  void validate() const {
    if (points_.rows() < 1) {
      throw InvalidInput("measure dimension must be positive");
    }
    if (points_.cols() < 1) {
      throw InvalidInput("a measure needs at least one atom");
    }
    if (weights_.size() != points_.cols()) {
      throw InvalidInput("points and weights have different lengths");
    }
    if (!points_.allFinite()) {
      throw InvalidInput("measure has a non-finite coordinate");
    }
    if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
      throw InvalidInput("weights must be finite and nonnegative");
    }
    if (std::abs(weights_.sum() - 1.0) > kWeightSumTolerance) {
      throw InvalidInput("weights do not sum to one");
    }
  }

  Matrix points_;
  Vector weights_;
};

inline DiscreteMeasure dirac(const Vector &x) {
  if (x.size() < 1 || !x.allFinite()) {
    throw InvalidInput("dirac: point must be finite and non-empty");
  }
  Matrix points = x;
  return {std::move(points), Vector::Ones(1)};
}

/// Image measure f#mu: weights kept, every atom mapped through f.
template <typename Map>
DiscreteMeasure pushforward(const DiscreteMeasure &mu, Map &&f) {
  Vector first = f(Vector(mu.point(0)));
  Matrix mapped(first.size(), mu.size());
  mapped.col(0) = first;
  for (Eigen::Index i = 1; i < mu.size(); ++i) {
    Vector image = f(Vector(mu.point(i)));
    if (image.size() != first.size()) {
      throw InvalidInput("pushforward: map changes output dimension");
    }
    mapped.col(i) = image;
  }
  if (!mapped.allFinite()) {
    throw InvalidInput("pushforward: map produced a non-finite point");
  }
  return {std::move(mapped), mu.weights()};
}

/// sqrt(sum_i w_i |x_i|^2), which is W2(mu, delta_0).
inline double second_moment_norm(const DiscreteMeasure &mu) {
  return std::sqrt(mu.points().colwise().squaredNorm().dot(mu.weights()));
}

// ---------------------------------------------------------------------------
// Sampling

/*
 * Source of i.i.d. samples. Gaussian covariances may be singular; they are
 * factored through a symmetric eigendecomposition and rejected when an
 * eigenvalue is negative beyond rounding.
 */
class MeasureGenerator {
 public:
  enum class Kind { gaussian, uniform_box, mixture, fixed_cloud };

  static MeasureGenerator gaussian(const Vector &mean, const Matrix &covariance) {
    if (mean.size() < 1 || covariance.rows() != mean.size() ||
        covariance.cols() != mean.size()) {
      throw InvalidInput("gaussian: mean/covariance shape mismatch");
    }
    if (!mean.allFinite() || !covariance.allFinite()) {
      throw InvalidInput("gaussian: non-finite parameters");
    }
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + covariance.cwiseAbs().maxCoeff())) {
      throw InvalidInput("gaussian: covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
    const Vector &values = eig.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (values.minCoeff() < -1e-12 * scale) {
      throw InvalidInput("gaussian: covariance is not positive semi-definite");
    }
    MeasureGenerator g(Kind::gaussian, mean.size());
    g.mean_ = mean;
    g.covariance_ = covariance;
    g.factor_ = eig.eigenvectors() *
                values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    return g;
  }

  static MeasureGenerator isotropic_gaussian(const Vector &mean, double stddev) {
    const auto d = mean.size();
    return gaussian(mean, Matrix::Identity(d, d) * (stddev * stddev));
  }

  static MeasureGenerator uniform_box(const Vector &lo, const Vector &hi) {
    if (lo.size() < 1 || lo.size() != hi.size() || !lo.allFinite() ||
        !hi.allFinite() || (hi.array() < lo.array()).any()) {
      throw InvalidInput("uniform_box: need finite lo <= hi of equal size");
    }
    MeasureGenerator g(Kind::uniform_box, lo.size());
    g.mean_ = lo;
    g.hi_ = hi;
    return g;
  }

  static MeasureGenerator mixture(std::vector<MeasureGenerator> components,
                                  std::vector<double> mixture_weights) {
    if (components.empty() || components.size() != mixture_weights.size()) {
      throw InvalidInput("mixture: components and weights must match");
    }
    double total = 0.0;
    for (double w : mixture_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidInput("mixture: weights must be nonnegative");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
      throw InvalidInput("mixture: weights do not sum to one");
    }
    const auto d = components.front().dim();
    for (const auto &c : components) {
      if (c.dim() != d) {
        throw InvalidInput("mixture: components disagree on dimension");
      }
    }
    MeasureGenerator g(Kind::mixture, d);
    g.components_ = std::make_shared<const std::vector<MeasureGenerator>>(
        std::move(components));
    g.mixture_weights_ = std::move(mixture_weights);
    return g;
  }

  static MeasureGenerator fixed_cloud(DiscreteMeasure cloud) {
    MeasureGenerator g(Kind::fixed_cloud, cloud.dim());
    g.cloud_ = std::make_shared<const DiscreteMeasure>(std::move(cloud));
    return g;
  }

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  const Vector &mean() const { return mean_; }
  const Matrix &covariance() const { return covariance_; }
  const Vector &lo() const { return mean_; }
  const Vector &hi() const { return hi_; }
  const std::vector<MeasureGenerator> &components() const { return *components_; }
  const std::vector<double> &mixture_weights() const { return mixture_weights_; }
  const DiscreteMeasure &cloud() const { return *cloud_; }

  /// Writes one draw into `out` (size dim()).
  void draw(PhiloxEngine &engine, Eigen::Ref<Vector> out) const {
    switch (kind_) {
      case Kind::gaussian: {
        Vector z(dim_);
        for (Eigen::Index j = 0; j < dim_; ++j) {
          z(j) = engine.normal();
        }
        out = mean_ + factor_ * z;
        return;
      }
      case Kind::uniform_box:
        for (Eigen::Index j = 0; j < dim_; ++j) {
          out(j) = mean_(j) + (hi_(j) - mean_(j)) * engine.uniform();
        }
        return;
      case Kind::mixture: {
        const auto c = pick(mixture_weights_, engine.uniform());
        (*components_)[c].draw(engine, out);
        return;
      }
      case Kind::fixed_cloud:
        out = cloud_->point(draw_atom(*cloud_, engine));
        return;
    }
  }

  /// Index of an atom of `mu` drawn according to its weights.
  static Eigen::Index draw_atom(const DiscreteMeasure &mu, PhiloxEngine &engine) {
    if (mu.size() == 1) {
      return 0;
    }
    if (mu.has_uniform_weights()) {
      return static_cast<Eigen::Index>(
          engine.below(static_cast<std::uint64_t>(mu.size())));
    }
    const double u = engine.uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      acc += mu.weight(i);
      if (u < acc) {
        return i;
      }
    }
    // u landed in the rounding slack of the cumulative sum.
    for (Eigen::Index i = mu.size() - 1; i >= 0; --i) {
      if (mu.weight(i) > 0.0) {
        return i;
      }
    }
    return mu.size() - 1;
  }

 private:
  MeasureGenerator(Kind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  static std::size_t pick(const std::vector<double> &weights, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) {
        return i;
      }
    }
    std::size_t last = weights.size() - 1;
    while (last > 0 && weights[last] == 0.0) {
      --last;
    }
    return last;
  }

  Kind kind_;
  Eigen::Index dim_;
  Vector mean_;  // lower corner for uniform_box
  Matrix covariance_;
  Matrix factor_;
  Vector hi_;
  std::shared_ptr<const std::vector<MeasureGenerator>> components_;
  std::vector<double> mixture_weights_;
  std::shared_ptr<const DiscreteMeasure> cloud_;
};

/// (1/n) sum_i delta_{xi_i} with xi_i i.i.d. from `gen`.
inline DiscreteMeasure sample_empirical(const MeasureGenerator &gen,
                                        Eigen::Index n, const RngStream &rng) {
  if (n < 1) {
    throw InvalidInput("sample_empirical: n must be at least 1");
  }
  PhiloxEngine engine(rng);
  Matrix points(gen.dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gen.draw(engine, points.col(i));
  }
  return DiscreteMeasure::uniform(std::move(points));
}

/// Either an explicit cloud or a generator; samples are drawn from it.
using MeasureSource = std::variant<DiscreteMeasure, MeasureGenerator>;

inline Eigen::Index source_dim(const MeasureSource &source) {
  return std::visit([](const auto &s) { return s.dim(); }, source);
}

/// Fills the columns of `out` with i.i.d. draws from `source`.
inline void draw_samples(const MeasureSource &source, PhiloxEngine &engine,
                         Eigen::Ref<Matrix> out) {
  if (const auto *cloud = std::get_if<DiscreteMeasure>(&source)) {
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
      out.col(i) = cloud->point(MeasureGenerator::draw_atom(*cloud, engine));
    }
    return;
  }
  const auto &gen = std::get<MeasureGenerator>(source);
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    gen.draw(engine, out.col(i));
  }
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_MEASURE_HPP_
