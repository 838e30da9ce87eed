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

#ifndef WASS_SMOOTH_FUNCTIONAL_HPP_
#define WASS_SMOOTH_FUNCTIONAL_HPP_

#include <wass_smooth/measure.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wass_smooth {

/*
 * A modulus of continuity w: [0, inf) -> [0, inf), continuous,
 * non-decreasing, concave, w(0) = 0.
 *
 * valid_radius restricts where the modulus is claimed to hold: only for
 * pairs with ||mu||_2, ||nu||_2 <= valid_radius. Infinity means global.
 */
class ModulusOfContinuity {
 public:
  enum class Kind { linear, hoelder, capped_linear };

  static ModulusOfContinuity linear(double lipschitz) {
    check_nonneg(lipschitz, "linear modulus constant");
    return ModulusOfContinuity(Kind::linear, lipschitz, 1.0, 0.0);
  }

  /// w(t) = C t^alpha with alpha in (0, 1].
  static ModulusOfContinuity hoelder(double alpha, double constant) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw InvalidInput("hoelder modulus: alpha must lie in (0, 1]");
    }
    check_nonneg(constant, "hoelder modulus constant");
    return ModulusOfContinuity(Kind::hoelder, constant, alpha, 0.0);
  }

  /// w(t) = min(L t, cap).
  static ModulusOfContinuity capped_linear(double lipschitz, double cap) {
    check_nonneg(lipschitz, "capped modulus constant");
    check_nonneg(cap, "capped modulus cap");
    return ModulusOfContinuity(Kind::capped_linear, lipschitz, 1.0, cap);
  }

  ModulusOfContinuity restricted_to(double radius) const {
    ModulusOfContinuity copy = *this;
    copy.valid_radius_ = radius;
    return copy;
  }

  double operator()(double t) const {
    if (t <= 0.0) {
      return 0.0;
    }
    switch (kind_) {
      case Kind::linear:
        return constant_ * t;
      case Kind::hoelder:
        return constant_ * std::pow(t, alpha_);
      case Kind::capped_linear:
        return std::min(constant_ * t, cap_);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double constant() const { return constant_; }
  double alpha() const { return alpha_; }
  double cap() const { return cap_; }
  double valid_radius() const { return valid_radius_; }
  bool is_global() const { return std::isinf(valid_radius_); }

 private:
  ModulusOfContinuity(Kind kind, double constant, double alpha, double cap)
      : kind_(kind), constant_(constant), alpha_(alpha), cap_(cap) {}

  static void check_nonneg(double v, const char *what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput(std::string(what) + " must be finite and nonnegative");
    }
  }

  Kind kind_;
  double constant_;
  double alpha_;
  double cap_;
  double valid_radius_ = std::numeric_limits<double>::infinity();
};

using GradMap = std::function<Vector(const DiscreteMeasure &, const Vector &)>;
using HessXMap = std::function<Matrix(const DiscreteMeasure &, const Vector &)>;
using HessMuMap =
    std::function<Matrix(const DiscreteMeasure &, const Vector &, const Vector &)>;

/*
 * u: P2(R^d) -> R with optional regularity metadata.
 *
 * Derivative conventions, for a point x in R^d:
 *   lions_grad(mu, x)      = d_mu u(mu)(x)                      in R^d
 *   lions_hess_x(mu, x)    = d_x d_mu u(mu)(x), entry [a][b] = d/dx_b of
 *                            component a of d_mu u(mu)(x)         in R^{d x d}
 *   lions_hess_mu(mu, x, y) = d^2_mu u(mu)(x, y), entry [a][b] = derivative
 *                            of component a of d_mu u(mu)(x) in the measure
 *                            direction at y, component b         in R^{d x d}
 */
struct Functional {
  std::string name;
  std::function<double(const DiscreteMeasure &)> eval;
  std::optional<ModulusOfContinuity> modulus;
  std::optional<double> lipschitz_const;
  GradMap lions_grad;
  HessXMap lions_hess_x;
  HessMuMap lions_hess_mu;

  double operator()(const DiscreteMeasure &mu) const { return eval(mu); }

  bool has_lions_grad() const { return static_cast<bool>(lions_grad); }
  bool has_second_derivatives() const {
    return static_cast<bool>(lions_hess_x) && static_cast<bool>(lions_hess_mu);
  }
};

/// Smooth scalar map on R^k with gradient and Hessian.
struct SmoothScalarMap {
  std::function<double(const Vector &)> value;
  std::function<Vector(const Vector &)> gradient;
  std::function<Matrix(const Vector &)> hessian;
};

/*
 * u(mu) = outer(int phi_1 dmu, ..., int phi_J dmu). Exact Lions
 * derivatives follow from the chain rule:
 *   d_mu u(mu)(x)       = sum_j d_j outer * grad phi_j(x)
 *   d_x d_mu u(mu)(x)   = sum_j d_j outer * hess phi_j(x)
 *   d^2_mu u(mu)(x, y)  = sum_{i,j} d_ij outer * grad phi_i(x) grad phi_j(y)^T
 */
struct CylindricalFunctional {
  SmoothScalarMap outer;
  std::vector<SmoothScalarMap> inner_tests;

  Vector moments(const DiscreteMeasure &mu) const {
    Vector m(static_cast<Eigen::Index>(inner_tests.size()));
    for (std::size_t j = 0; j < inner_tests.size(); ++j) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < mu.size(); ++i) {
        acc += mu.weight(i) * inner_tests[j].value(Vector(mu.point(i)));
      }
      m(static_cast<Eigen::Index>(j)) = acc;
    }
    return m;
  }

  Functional build(std::string name) const {
    auto self = std::make_shared<const CylindricalFunctional>(*this);
    Functional u;
    u.name = std::move(name);
    u.eval = [self](const DiscreteMeasure &mu) {
      return self->outer.value(self->moments(mu));
    };
    u.lions_grad = [self](const DiscreteMeasure &mu, const Vector &x) {
      const Vector outer_grad = self->outer.gradient(self->moments(mu));
      Vector g = Vector::Zero(x.size());
      for (std::size_t j = 0; j < self->inner_tests.size(); ++j) {
        g += outer_grad(static_cast<Eigen::Index>(j)) * self->inner_tests[j].gradient(x);
      }
      return g;
    };
    u.lions_hess_x = [self](const DiscreteMeasure &mu, const Vector &x) {
      const Vector outer_grad = self->outer.gradient(self->moments(mu));
      Matrix h = Matrix::Zero(x.size(), x.size());
      for (std::size_t j = 0; j < self->inner_tests.size(); ++j) {
        h += outer_grad(static_cast<Eigen::Index>(j)) * self->inner_tests[j].hessian(x);
      }
      return h;
    };
    u.lions_hess_mu = [self](const DiscreteMeasure &mu, const Vector &x,
                             const Vector &y) {
      const Matrix outer_hess = self->outer.hessian(self->moments(mu));
      const auto count = self->inner_tests.size();
      std::vector<Vector> gx, gy;
      for (const auto &phi : self->inner_tests) {
        gx.push_back(phi.gradient(x));
        gy.push_back(phi.gradient(y));
      }
      Matrix h = Matrix::Zero(x.size(), y.size());
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
          h += outer_hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
               gx[i] * gy[j].transpose();
        }
      }
      return h;
    };
    return u;
  }
};

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_FUNCTIONAL_HPP_
