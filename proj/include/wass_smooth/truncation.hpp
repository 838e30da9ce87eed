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

#ifndef WASS_SMOOTH_TRUNCATION_HPP_
#define WASS_SMOOTH_TRUNCATION_HPP_

#include <wass_smooth/functional.hpp>
#include <wass_smooth/measure.hpp>
#include <wass_smooth/rng.hpp>

#include <cmath>
#include <string>

namespace wass_smooth {

/*
 * Support radius of gamma_k is support_factor * k. With the radial
 * exp(-1/t) smooth step below, the radial Jacobian eigenvalue
 * (r psi(r))' bottoms out at -1.12 for factor 10, -1.02 for 20 and -0.98
 * for 40, so doubling from 10 first satisfies |D gamma_k| <= 1 at 40.
 * calibrate_support_factor() reproduces this.
 */
inline constexpr double kDefaultSupportFactor = 40.0;
inline constexpr double kJacobianTolerance = 1e-6;
inline constexpr double kJacobianStep = 1e-5;

/// S(t) = f(t) / (f(t) + f(1 - t)), f(t) = exp(-1/t) for t > 0, and its derivatives.
struct SmoothStep {
  double value;
  double d1;
  double d2;

  static SmoothStep at(double t) {
    if (t <= 0.0) {
      return {0.0, 0.0, 0.0};
    }
    if (t >= 1.0) {
      return {1.0, 0.0, 0.0};
    }
    const double s = 1.0 - t;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / s);
    const double a1 = a / (t * t);
    const double a2 = a * (1.0 / (t * t * t * t) - 2.0 / (t * t * t));
    // b(t) = f(1 - t): b' = -f'(s), b'' = f''(s)
    const double b1 = -b / (s * s);
    const double b2 = b * (1.0 / (s * s * s * s) - 2.0 / (s * s * s));
    const double den = a + b;
    const double num1 = a1 * b - a * b1;
    const double num1_prime = a2 * b - a * b2;
    return {a / den, num1 / (den * den),
            num1_prime / (den * den) - 2.0 * num1 * (a1 + b1) / (den * den * den)};
  }
};

/*
 * gamma_k(x) = x psi_k(|x|) with psi_k = 1 on [0, k], 0 on [R_k, inf) and a
 * smooth step in between. The plateau and the exterior are exact branches.
 */
class TruncationMap {
 public:
  TruncationMap(Eigen::Index dim, int k, double support_factor = kDefaultSupportFactor)
      : dim_(dim), k_(k), plateau_(static_cast<double>(k)),
        support_(support_factor * static_cast<double>(k)),
        support_factor_(support_factor) {
    if (dim < 1) {
      throw InvalidInput("truncation map: dimension must be positive");
    }
    if (k < 1) {
      throw InvalidInput("truncation map: k must be at least 1");
    }
    if (!(support_factor > 1.0) || !std::isfinite(support_factor)) {
      throw InvalidInput("truncation map: support factor must exceed 1");
    }
  }

  Eigen::Index dim() const { return dim_; }
  int k() const { return k_; }
  double plateau_radius() const { return plateau_; }
  double support_radius() const { return support_; }
  double support_factor() const { return support_factor_; }

  /// psi(r), psi'(r), psi''(r).
  SmoothStep profile(double r) const {
    if (r <= plateau_) {
      return {1.0, 0.0, 0.0};
    }
    if (r >= support_) {
      return {0.0, 0.0, 0.0};
    }
    const double width = support_ - plateau_;
    const auto s = SmoothStep::at((r - plateau_) / width);
    return {1.0 - s.value, -s.d1 / width, -s.d2 / (width * width)};
  }

  Vector apply(const Vector &x) const {
    Vector out(x.size());
    apply_into(x, out);
    return out;
  }

  template <typename In, typename Out>
  void apply_into(const In &x, Out &&out) const {
    const double r = x.norm();
    if (r <= plateau_) {
      out = x;
    } else if (r >= support_) {
      out.setZero();
    } else {
      out = x * profile(r).value;
    }
  }

  Vector operator()(const Vector &x) const { return apply(x); }

  /// D gamma(x) = psi I + (psi'/r) x x^T.
  Matrix jacobian(const Vector &x) const {
    const auto d = x.size();
    const double r = x.norm();
    if (r <= plateau_) {
      return Matrix::Identity(d, d);
    }
    if (r >= support_) {
      return Matrix::Zero(d, d);
    }
    const auto p = profile(r);
    return p.value * Matrix::Identity(d, d) + (p.d1 / r) * x * x.transpose();
  }

  /// sum_l g_l Hess(gamma_l)(x).
  Matrix contracted_hessian(const Vector &x, const Vector &g) const {
    const auto d = x.size();
    const double r = x.norm();
    if (r <= plateau_ || r >= support_) {
      return Matrix::Zero(d, d);
    }
    const auto p = profile(r);
    const double gx = g.dot(x);
    Matrix h = (p.d1 / r) * (g * x.transpose() + x * g.transpose());
    h += gx * (p.d2 / (r * r) - p.d1 / (r * r * r)) * x * x.transpose();
    h.diagonal().array() += gx * p.d1 / r;
    return h;
  }

  /// gamma # mu.
  DiscreteMeasure push(const DiscreteMeasure &mu) const {
    Matrix mapped(mu.dim(), mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      apply_into(mu.point(i), mapped.col(i));
    }
    return {std::move(mapped), mu.weights()};
  }

 private:
  Eigen::Index dim_;
  int k_;
  double plateau_;
  double support_;
  double support_factor_;
};

inline TruncationMap make_truncation(Eigen::Index dim, int k,
                                     double support_factor = kDefaultSupportFactor) {
  return TruncationMap(dim, k, support_factor);
}

/// Central finite-difference Jacobian of gamma at x.
inline Matrix fd_jacobian(const TruncationMap &map, const Vector &x,
                          double h = kJacobianStep) {
  const auto d = x.size();
  Matrix jac(d, d);
  Vector xp = x, xm = x;
  for (Eigen::Index b = 0; b < d; ++b) {
    xp(b) = x(b) + h;
    xm(b) = x(b) - h;
    jac.col(b) = (map.apply(xp) - map.apply(xm)) / (2.0 * h);
    xp(b) = x(b);
    xm(b) = x(b);
  }
  return jac;
}

inline double operator_norm(const Matrix &m) {
  if (m.rows() == 1 && m.cols() == 1) {
    return std::abs(m(0, 0));
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// Uniform draw on the sphere of radius r.
inline Vector random_on_sphere(PhiloxEngine &engine, Eigen::Index dim, double r) {
  Vector z(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index j = 0; j < dim; ++j) {
      z(j) = engine.normal();
    }
    norm = z.norm();
  } while (norm == 0.0);
  return z * (r / norm);
}

/*
 * Largest finite-difference Jacobian operator norm over `samples` points
 * whose radii are uniform on [0, 1.25 R_k].
 */
inline double sampled_jacobian_bound(const TruncationMap &map, long samples,
                                     const RngStream &rng,
                                     double h = kJacobianStep) {
  PhiloxEngine engine(rng);
  double worst = 0.0;
  for (long s = 0; s < samples; ++s) {
    const double r = 1.25 * map.support_radius() * engine.uniform();
    const Vector x = random_on_sphere(engine, map.dim(), r);
    worst = std::max(worst, operator_norm(fd_jacobian(map, x, h)));
  }
  return worst;
}

/*
 * Start from `start` and double the support factor until the sampled
 * Jacobian bound holds. Fails loudly instead of relaxing the bound.
 */
inline double calibrate_support_factor(Eigen::Index dim, double start, long samples,
                                       const RngStream &rng, int max_doublings = 8) {
  double factor = start;
  for (int attempt = 0; attempt <= max_doublings; ++attempt) {
    const TruncationMap map(dim, 1, factor);
    if (sampled_jacobian_bound(map, samples, rng) <= 1.0 + kJacobianTolerance) {
      return factor;
    }
    factor *= 2.0;
  }
  throw std::runtime_error("truncation calibration failed: Jacobian bound never held");
}

/*
 * u * gamma_k: mu -> u(gamma_k # mu). Keeps the modulus and Lipschitz
 * constant of u. Derivatives, when u has them, follow the pushforward
 * chain rule with nu = gamma # mu:
 *   d_mu  = Dg(x)^T  d_mu u(nu)(g(x))
 *   d_x d_mu = sum_l [d_mu u(nu)(g(x))]_l Hess g_l(x)
 *              + Dg(x)^T d_x d_mu u(nu)(g(x)) Dg(x)
 *   d2_mu = Dg(x)^T d2_mu u(nu)(g(x), g(y)) Dg(y)
 */
inline Functional truncate_functional(const Functional &u, const TruncationMap &map) {
  auto base = std::make_shared<const Functional>(u);
  Functional out;
  out.name = u.name + "*gamma_" + std::to_string(map.k());
  out.modulus = u.modulus;
  out.lipschitz_const = u.lipschitz_const;
  out.eval = [base, map](const DiscreteMeasure &mu) { return base->eval(map.push(mu)); };
  if (u.lions_grad) {
    out.lions_grad = [base, map](const DiscreteMeasure &mu, const Vector &x) {
      const DiscreteMeasure pushed = map.push(mu);
      return Vector(map.jacobian(x).transpose() * base->lions_grad(pushed, map.apply(x)));
    };
  }
  if (u.lions_grad && u.lions_hess_x) {
    out.lions_hess_x = [base, map](const DiscreteMeasure &mu, const Vector &x) {
      const DiscreteMeasure pushed = map.push(mu);
      const Vector gx = map.apply(x);
      const Matrix jac = map.jacobian(x);
      const Vector g = base->lions_grad(pushed, gx);
      return Matrix(map.contracted_hessian(x, g) +
                    jac.transpose() * base->lions_hess_x(pushed, gx) * jac);
    };
  }
  if (u.lions_hess_mu) {
    out.lions_hess_mu = [base, map](const DiscreteMeasure &mu, const Vector &x,
                                    const Vector &y) {
      const DiscreteMeasure pushed = map.push(mu);
      return Matrix(map.jacobian(x).transpose() *
                    base->lions_hess_mu(pushed, map.apply(x), map.apply(y)) *
                    map.jacobian(y));
    };
  }
  return out;
}

inline Functional truncate_functional(const Functional &u, int k,
                                      double support_factor = kDefaultSupportFactor) {
  return truncate_functional(u, TruncationMap(1, k, support_factor));
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_TRUNCATION_HPP_
