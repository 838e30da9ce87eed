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

#ifndef WASS_SMOOTH_ZOO_HPP_
#define WASS_SMOOTH_ZOO_HPP_

#include <wass_smooth/functional.hpp>
#include <wass_smooth/transport.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace wass_smooth {

/// Ball radius on which quadratic_mean's modulus is declared.
inline constexpr double kDefaultModulusRadius = 3.0;

inline Functional constant_functional(double c) {
  Functional u;
  u.name = "constant";
  u.eval = [c](const DiscreteMeasure &) { return c; };
  u.modulus = ModulusOfContinuity::linear(0.0);
  u.lipschitz_const = 0.0;
  u.lions_grad = [](const DiscreteMeasure &, const Vector &x) {
    return Vector(Vector::Zero(x.size()));
  };
  u.lions_hess_x = [](const DiscreteMeasure &, const Vector &x) {
    return Matrix(Matrix::Zero(x.size(), x.size()));
  };
  u.lions_hess_mu = [](const DiscreteMeasure &, const Vector &x, const Vector &y) {
    return Matrix(Matrix::Zero(x.size(), y.size()));
  };
  return u;
}

/*
 * u(mu) = int f dmu. |u(mu) - u(nu)| <= L_f W1 <= L_f W2, so the declared
 * Lipschitz constant is L_f. d_mu u(mu)(x) = grad f(x), d_x d_mu u = Hess f,
 * d2_mu u = 0.
 */
inline Functional linear_functional(const SmoothScalarMap &f, double lipschitz,
                                    std::string name = "linear") {
  CylindricalFunctional cyl;
  cyl.outer.value = [](const Vector &m) { return m(0); };
  cyl.outer.gradient = [](const Vector &) { return Vector(Vector::Ones(1)); };
  cyl.outer.hessian = [](const Vector &) { return Matrix(Matrix::Zero(1, 1)); };
  cyl.inner_tests.push_back(f);
  Functional u = cyl.build(std::move(name));
  if (std::isfinite(lipschitz)) {
    u.lipschitz_const = lipschitz;
    u.modulus = ModulusOfContinuity::linear(lipschitz);
  }
  // Skip the moment vector on the hot path.
  u.eval = [f](const DiscreteMeasure &mu) {
    double acc = 0.0;
    Vector x(mu.dim());
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      x = mu.point(i);
      acc += mu.weight(i) * f.value(x);
    }
    return acc;
  };
  return u;
}

/// f(x) = x_1.
inline SmoothScalarMap first_coordinate() {
  return {[](const Vector &x) { return x(0); },
          [](const Vector &x) {
            Vector g = Vector::Zero(x.size());
            g(0) = 1.0;
            return g;
          },
          [](const Vector &x) { return Matrix(Matrix::Zero(x.size(), x.size())); }};
}

/// f(x) = sin(x_1): bounded, smooth, 1-Lipschitz.
inline SmoothScalarMap sine_of_first_coordinate() {
  return {[](const Vector &x) { return std::sin(x(0)); },
          [](const Vector &x) {
            Vector g = Vector::Zero(x.size());
            g(0) = std::cos(x(0));
            return g;
          },
          [](const Vector &x) {
            Matrix h = Matrix::Zero(x.size(), x.size());
            h(0, 0) = -std::sin(x(0));
            return h;
          }};
}

/// f(x) = |x|^2.
inline SmoothScalarMap squared_norm() {
  return {[](const Vector &x) { return x.squaredNorm(); },
          [](const Vector &x) { return Vector(2.0 * x); },
          [](const Vector &x) {
            return Matrix(2.0 * Matrix::Identity(x.size(), x.size()));
          }};
}

/// u(mu) = ||mu||_2^2 = int |x|^2 dmu. Not Lipschitz, no modulus.
inline Functional second_moment_functional() {
  return linear_functional(squared_norm(), std::numeric_limits<double>::infinity(),
                           "second_moment");
}

/*
 * u(mu) = W2(mu, nu0). 1-Lipschitz by the triangle inequality; carries no
 * derivative metadata.
 */
inline Functional w2_to_anchor(const DiscreteMeasure &nu0) {
  auto anchor = std::make_shared<const DiscreteMeasure>(nu0);
  Functional u;
  u.name = "w2_anchor";
  u.eval = [anchor](const DiscreteMeasure &mu) { return w2_exact(mu, *anchor).distance; };
  u.lipschitz_const = 1.0;
  u.modulus = ModulusOfContinuity::linear(1.0);
  return u;
}

/// Uniform measure on {+-e_1, +-e_2} (on {-1, +1} when d = 1).
inline DiscreteMeasure default_anchor(Eigen::Index dim) {
  const Eigen::Index axes = std::min<Eigen::Index>(dim, 2);
  Matrix points = Matrix::Zero(dim, 2 * axes);
  for (Eigen::Index a = 0; a < axes; ++a) {
    points(a, 2 * a) = 1.0;
    points(a, 2 * a + 1) = -1.0;
  }
  return DiscreteMeasure::uniform(std::move(points));
}

/*
 * u(mu) = |int x dmu|^2 with d_mu u = 2 m, d_x d_mu u = 0, d2_mu u = 2 I.
 * Not globally Lipschitz; on the ball ||mu||_2 <= R it is 2R-Lipschitz and
 * bounded by R^2, which gives the declared capped modulus.
 */
inline Functional quadratic_mean_functional(Eigen::Index dim,
                                            double radius = kDefaultModulusRadius) {
  CylindricalFunctional cyl;
  cyl.outer.value = [](const Vector &m) { return m.squaredNorm(); };
  cyl.outer.gradient = [](const Vector &m) { return Vector(2.0 * m); };
  cyl.outer.hessian = [](const Vector &m) {
    return Matrix(2.0 * Matrix::Identity(m.size(), m.size()));
  };
  for (Eigen::Index j = 0; j < dim; ++j) {
    cyl.inner_tests.push_back(
        {[j](const Vector &x) { return x(j); },
         [j](const Vector &x) {
           Vector g = Vector::Zero(x.size());
           g(j) = 1.0;
           return g;
         },
         [](const Vector &x) { return Matrix(Matrix::Zero(x.size(), x.size())); }});
  }
  Functional u = cyl.build("quadratic_mean");
  u.modulus = ModulusOfContinuity::capped_linear(2.0 * radius, radius * radius)
                  .restricted_to(radius);
  u.eval = [](const DiscreteMeasure &mu) { return mu.mean().squaredNorm(); };
  u.lions_grad = [](const DiscreteMeasure &mu, const Vector &) {
    return Vector(2.0 * mu.mean());
  };
  u.lions_hess_x = [](const DiscreteMeasure &mu, const Vector &x) {
    return Matrix(Matrix::Zero(mu.dim(), x.size()));
  };
  u.lions_hess_mu = [](const DiscreteMeasure &mu, const Vector &, const Vector &) {
    return Matrix(2.0 * Matrix::Identity(mu.dim(), mu.dim()));
  };
  return u;
}

/// Names accepted by make_zoo_functional.
inline std::vector<std::string> zoo_names() {
  return {"constant", "linear_x1", "linear_sin", "second_moment", "w2_anchor",
          "quadratic_mean"};
}

inline bool is_zoo_name(const std::string &name) {
  for (const auto &n : zoo_names()) {
    if (n == name) {
      return true;
    }
  }
  return false;
}

inline Functional make_zoo_functional(const std::string &name, Eigen::Index dim) {
  if (name == "constant") {
    return constant_functional(1.0);
  }
  if (name == "linear_x1") {
    return linear_functional(first_coordinate(), 1.0, name);
  }
  if (name == "linear_sin") {
    return linear_functional(sine_of_first_coordinate(), 1.0, name);
  }
  if (name == "second_moment") {
    return second_moment_functional();
  }
  if (name == "w2_anchor") {
    return w2_to_anchor(default_anchor(dim));
  }
  if (name == "quadratic_mean") {
    return quadratic_mean_functional(dim);
  }
  throw InvalidInput("unknown functional '" + name + "'");
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_ZOO_HPP_
