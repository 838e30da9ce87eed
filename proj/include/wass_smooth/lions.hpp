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

#ifndef WASS_SMOOTH_LIONS_HPP_
#define WASS_SMOOTH_LIONS_HPP_

#include <wass_smooth/functional.hpp>
#include <wass_smooth/measure.hpp>
#include <wass_smooth/measure_io.hpp>
#include <wass_smooth/parallel.hpp>
#include <wass_smooth/smoothing.hpp>
#include <wass_smooth/truncation.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wass_smooth {

inline constexpr double kGradientStep = 1e-5;
inline constexpr double kHessianStep = 1e-4;

// ---------------------------------------------------------------------------
// Finite-difference particle oracle

/*
 * For an empirical measure with n equal weights,
 *   D_{x_i} u(mu) = (1/n) d_mu u(mu)(x_i).
 * per_particle[i] holds the central-difference estimate of the left side.
 */
struct ParticleGradient {
  DiscreteMeasure base_measure;
  std::vector<Vector> per_particle;
};

namespace detail {

inline void require_uniform(const DiscreteMeasure &mu, const char *who) {
  if (!mu.has_uniform_weights()) {
    throw InvalidInput(std::string(who) + ": measure must have equal weights");
  }
}

inline double eval_moved(const Functional &u, const DiscreteMeasure &mu, Matrix &points) {
  return u.eval(DiscreteMeasure(points, mu.weights()));
}

}  // namespace detail

inline ParticleGradient particle_fd_gradient(const Functional &u, const DiscreteMeasure &mu,
                                             double h = kGradientStep) {
  detail::require_uniform(mu, "particle_fd_gradient");
  if (!(h > 0.0)) {
    throw InvalidInput("particle_fd_gradient: step must be positive");
  }
  Matrix points = mu.points();
  ParticleGradient out{mu, {}};
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    Vector g(mu.dim());
    for (Eigen::Index a = 0; a < mu.dim(); ++a) {
      const double saved = points(a, i);
      points(a, i) = saved + h;
      const double up = detail::eval_moved(u, mu, points);
      points(a, i) = saved - h;
      const double down = detail::eval_moved(u, mu, points);
      points(a, i) = saved;
      g(a) = (up - down) / (2.0 * h);
    }
    out.per_particle.push_back(std::move(g));
  }
  return out;
}

/*
 * Block [a][b] = d^2 u / (d x_{i,a} d x_{j,b}) on the particle lifting.
 * For equal weights this equals (1/n^2) d2_mu u(x_i, x_j) plus, when i == j,
 * (1/n) d_x d_mu u(x_i).
 */
inline Matrix particle_fd_hessian_block(const Functional &u, const DiscreteMeasure &mu,
                                        Eigen::Index i, Eigen::Index j,
                                        double h = kHessianStep) {
  detail::require_uniform(mu, "particle_fd_hessian_block");
  const auto d = mu.dim();
  Matrix points = mu.points();
  Matrix block(d, d);
  auto shifted = [&](Eigen::Index a, double sa, Eigen::Index b, double sb) {
    points(a, i) += sa;
    points(b, j) += sb;
    const double v = detail::eval_moved(u, mu, points);
    points(a, i) -= sa;
    points(b, j) -= sb;
    return v;
  };
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      block(a, b) = (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) +
                     shifted(a, -h, b, -h)) /
                    (4.0 * h * h);
    }
  }
  return block;
}

// ---------------------------------------------------------------------------
// Derivatives of v_{k,n,m}

/*
 * Monte-Carlo estimates at a probe. Standard errors are per component.
 * hess_x_correction is the (1/n) d2_mu term inside hess_x, reported
 * separately so its decay in n can be observed.
 */
struct DerivativeEstimate {
  Vector x;
  std::optional<Vector> z;
  Vector grad;
  Vector grad_se;
  std::optional<Matrix> hess_x;
  std::optional<Matrix> hess_x_se;
  std::optional<Matrix> hess_x_correction;
  std::optional<Matrix> hess_x_correction_se;
  std::optional<Matrix> hess_mu;
  std::optional<Matrix> hess_mu_se;
  SmoothingConfig config;
};

/// Per-component Welford accumulator for vector- or matrix-valued samples.
class ComponentStats {
 public:
  void add(const Eigen::Ref<const Eigen::ArrayXd> &x) {
    if (count_ == 0) {
      mean_ = Eigen::ArrayXd::Zero(x.size());
      m2_ = Eigen::ArrayXd::Zero(x.size());
    }
    ++count_;
    const Eigen::ArrayXd delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  const Eigen::ArrayXd &mean() const { return mean_; }
  Eigen::ArrayXd std_error() const {
    if (count_ < 2) {
      return Eigen::ArrayXd::Zero(mean_.size());
    }
    const double c = static_cast<double>(count_);
    return (m2_ / (c - 1.0)).max(0.0).sqrt() / std::sqrt(c);
  }

 private:
  std::size_t count_ = 0;
  Eigen::ArrayXd mean_;
  Eigen::ArrayXd m2_;
};

namespace detail {

inline void require_gradient(const Functional &u) {
  if (!u.has_lions_grad()) {
    throw UnsupportedFunctional("functional '" + u.name + "' has no Lions derivative");
  }
}

inline void require_second(const Functional &u) {
  if (!u.has_lions_grad() || !u.has_second_derivatives()) {
    throw UnsupportedFunctional("functional '" + u.name +
                                "' has no second-order Lions derivatives");
  }
}

/*
 * One replicate's particle cloud: n draws from mu, then the first
 * pinned.size() slots replaced by the pinned points, then every atom shifted
 * by its own noise -Y_i.
 */
inline Matrix pinned_cloud(const MeasureSource &mu, Eigen::Index n,
                           const std::vector<const Vector *> &pinned, double noise_sd,
                           const RngStream &stream) {
  Matrix points(source_dim(mu), n);
  PhiloxEngine xi_engine(stream.substream(0));
  draw_samples(mu, xi_engine, points);
  for (std::size_t s = 0; s < pinned.size(); ++s) {
    points.col(static_cast<Eigen::Index>(s)) = *pinned[s];
  }
  if (noise_sd > 0.0) {
    PhiloxEngine z_engine(stream.substream(1));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index a = 0; a < points.rows(); ++a) {
        points(a, i) -= noise_sd * z_engine.normal();
      }
    }
  }
  return points;
}

template <typename Sample>
std::vector<Eigen::ArrayXd> run_replicates(const SmoothingConfig &cfg, Sample &&sample) {
  std::vector<Eigen::ArrayXd> slots(static_cast<std::size_t>(cfg.mc_reps));
  parallel_for(slots.size(), cfg.threads,
               [&](std::size_t r) { slots[r] = sample(cfg.rng.substream(r)); });
  return slots;
}

inline Matrix as_matrix(const Eigen::ArrayXd &flat, Eigen::Index rows, Eigen::Index cols,
                        Eigen::Index offset) {
  return Eigen::Map<const Matrix>(flat.data() + offset, rows, cols);
}

}  // namespace detail

/*
 * d_mu U(nu)(x - y_slot) where nu is the uniform measure on the columns of
 * `shifted` (the atom in `slot` is x - y_slot). Building block of the
 * per-index formula before symmetrization.
 */
inline Vector pinned_gradient_integrand(const Functional &truncated, const Matrix &shifted,
                                        Eigen::Index slot) {
  detail::require_gradient(truncated);
  const DiscreteMeasure nu = DiscreteMeasure::uniform(shifted);
  return truncated.lions_grad(nu, shifted.col(slot));
}

/*
 * d_mu v_{k,n,m}(mu)(x) = E[ d_mu U(nu_x)(x - Y_1) ],
 *   nu_x = (1/n) sum_{i>=2} delta_{xi_i - Y_i} + (1/n) delta_{x - Y_1},
 * with U = u * gamma_k.
 */
inline DerivativeEstimate grad_v_knm(const Functional &u, const SmoothingConfig &cfg,
                                     const MeasureSource &mu, const Vector &x) {
  detail::require_gradient(u);
  cfg.validate();
  const auto d = source_dim(mu);
  if (x.size() != d) {
    throw InvalidInput("grad_v_knm: probe dimension does not match the measure");
  }
  const Functional truncated = truncate_functional(u, TruncationMap(d, cfg.k, cfg.support_factor));
  const double noise_sd = cfg.noise_stddev();
  const auto slots = detail::run_replicates(cfg, [&](const RngStream &stream) {
    const Matrix pts = detail::pinned_cloud(mu, cfg.n, {&x}, noise_sd, stream);
    return Eigen::ArrayXd(pinned_gradient_integrand(truncated, pts, 0).array());
  });
  ComponentStats stats;
  for (const auto &s : slots) {
    stats.add(s);
  }
  DerivativeEstimate est;
  est.x = x;
  est.grad = stats.mean().matrix();
  est.grad_se = stats.std_error().matrix();
  est.config = cfg;
  return est;
}

/*
 * Second derivatives of v_{k,n,m}, with U = u * gamma_k:
 *
 *   d2_mu v(mu)(x, z) = ((n-1)/n) E[ d2_mu U(nu_xz)(x - Y_1, z - Y_2) ],
 *     nu_xz = (1/n) sum_{i>=3} delta_{xi_i - Y_i} + (1/n) delta_{x - Y_1}
 *             + (1/n) delta_{z - Y_2};
 *   the factor counts the n - 1 free slots that still depend on mu, and
 *   d2_mu v = 0 when n = 1.
 *
 *   d_x d_mu v(mu)(x) = (1/n) E[ d2_mu U(nu_x)(x - Y_1, x - Y_1) ]
 *                       + E[ d_x d_mu U(nu_x)(x - Y_1) ].
 *
 * The gradient is estimated from the same replicates.
 */
inline DerivativeEstimate hess_v_knm(const Functional &u, const SmoothingConfig &cfg,
                                     const MeasureSource &mu, const Vector &x,
                                     const Vector &z) {
  detail::require_second(u);
  cfg.validate();
  const auto d = source_dim(mu);
  if (x.size() != d || z.size() != d) {
    throw InvalidInput("hess_v_knm: probe dimension does not match the measure");
  }
  const Functional truncated = truncate_functional(u, TruncationMap(d, cfg.k, cfg.support_factor));
  const double noise_sd = cfg.noise_stddev();
  const Eigen::Index n = cfg.n;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double free_fraction = static_cast<double>(n - 1) * inv_n;
  const Eigen::Index dd = d * d;
  // layout: grad (d) | hess_x main (dd) | correction (dd) | hess_mu (dd)
  const auto slots = detail::run_replicates(cfg, [&](const RngStream &stream) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(d + 3 * dd);
    const Matrix pts_x = detail::pinned_cloud(mu, n, {&x}, noise_sd, stream);
    const DiscreteMeasure nu_x = DiscreteMeasure::uniform(pts_x);
    const Vector at_x = pts_x.col(0);
    out.segment(0, d) = truncated.lions_grad(nu_x, at_x).array();
    const Matrix main = truncated.lions_hess_x(nu_x, at_x);
    const Matrix corr = inv_n * truncated.lions_hess_mu(nu_x, at_x, at_x);
    out.segment(d, dd) = Eigen::Map<const Eigen::ArrayXd>(main.data(), dd);
    out.segment(d + dd, dd) = Eigen::Map<const Eigen::ArrayXd>(corr.data(), dd);
    if (n >= 2) {
      const Matrix pts_xz = detail::pinned_cloud(mu, n, {&x, &z}, noise_sd, stream);
      const Matrix hm = free_fraction *
                        truncated.lions_hess_mu(DiscreteMeasure::uniform(pts_xz),
                                                pts_xz.col(0), pts_xz.col(1));
      out.segment(d + 2 * dd, dd) = Eigen::Map<const Eigen::ArrayXd>(hm.data(), dd);
    }
    return out;
  });
  ComponentStats stats;
  ComponentStats hess_x_stats;
  for (const auto &s : slots) {
    stats.add(s);
    hess_x_stats.add(s.segment(d, dd) + s.segment(d + dd, dd));
  }
  const Eigen::ArrayXd mean = stats.mean();
  const Eigen::ArrayXd se = stats.std_error();
  DerivativeEstimate est;
  est.x = x;
  est.z = z;
  est.grad = mean.segment(0, d).matrix();
  est.grad_se = se.segment(0, d).matrix();
  est.hess_x = detail::as_matrix(hess_x_stats.mean(), d, d, 0);
  est.hess_x_se = detail::as_matrix(hess_x_stats.std_error(), d, d, 0);
  est.hess_x_correction = detail::as_matrix(mean, d, d, d + dd);
  est.hess_x_correction_se = detail::as_matrix(se, d, d, d + dd);
  est.hess_mu = detail::as_matrix(mean, d, d, d + 2 * dd);
  est.hess_mu_se = detail::as_matrix(se, d, d, d + 2 * dd);
  est.config = cfg;
  return est;
}

// ---------------------------------------------------------------------------
// Convergence along a schedule

struct DerivativeProbe {
  DiscreteMeasure mu;
  Vector x;
  std::optional<Vector> z;
};

struct DerivativeRow {
  ScheduleEntry entry;
  double grad_sup_error = 0.0;
  double grad_max_std_error = 0.0;
  std::optional<double> hess_x_sup_error;
  std::optional<double> hess_mu_sup_error;
  std::optional<double> hess_max_std_error;
};

/*
 * Sup over probes of |estimate - exact| (Euclidean norm for gradients,
 * Frobenius for matrices) per schedule entry. Second-order columns are
 * filled when u has second derivatives and every probe carries z.
 * Entry e and probe p use stream rng.substream(e).substream(p).
 */
inline std::vector<DerivativeRow> derivative_convergence_experiment(
    const Functional &u, const DiagonalSchedule &schedule,
    const std::vector<DerivativeProbe> &probes, const RngStream &rng, int threads = 1,
    double support_factor = kDefaultSupportFactor) {
  detail::require_gradient(u);
  bool second = u.has_second_derivatives() && !probes.empty();
  for (const auto &p : probes) {
    second = second && p.z.has_value();
  }
  std::vector<DerivativeRow> rows;
  for (std::size_t e = 0; e < schedule.size(); ++e) {
    const auto &entry = schedule.entries()[e];
    DerivativeRow row;
    row.entry = entry;
    if (second) {
      row.hess_x_sup_error = 0.0;
      row.hess_mu_sup_error = 0.0;
      row.hess_max_std_error = 0.0;
    }
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto &probe = probes[p];
      const auto cfg = config_for(entry, rng.substream(e).substream(p), threads, support_factor);
      const auto est = second ? hess_v_knm(u, cfg, probe.mu, probe.x, *probe.z)
                              : grad_v_knm(u, cfg, probe.mu, probe.x);
      row.grad_sup_error = std::max(
          row.grad_sup_error, (est.grad - u.lions_grad(probe.mu, probe.x)).norm());
      row.grad_max_std_error = std::max(row.grad_max_std_error, est.grad_se.maxCoeff());
      if (second) {
        row.hess_x_sup_error =
            std::max(*row.hess_x_sup_error,
                     (*est.hess_x - u.lions_hess_x(probe.mu, probe.x)).norm());
        row.hess_mu_sup_error =
            std::max(*row.hess_mu_sup_error,
                     (*est.hess_mu - u.lions_hess_mu(probe.mu, probe.x, *probe.z)).norm());
        row.hess_max_std_error = std::max(
            {*row.hess_max_std_error, est.hess_x_se->maxCoeff(), est.hess_mu_se->maxCoeff()});
      }
    }
    rows.push_back(row);
  }
  return rows;
}

/// CSV with columns k,n,m,grad_sup_error,hess_x_sup_error,hess_mu_sup_error,...
inline std::string derivative_csv(const std::vector<DerivativeRow> &rows) {
  auto opt = [](const std::optional<double> &v) {
    return v ? format_double(*v) : std::string();
  };
  std::string out =
      "k,n,m,grad_sup_error,hess_x_sup_error,hess_mu_sup_error,grad_max_std_error,"
      "hess_max_std_error\n";
  for (const auto &r : rows) {
    out += std::to_string(r.entry.k) + ',' + std::to_string(r.entry.n) + ',' +
           std::to_string(r.entry.m) + ',' + format_double(r.grad_sup_error) + ',' +
           opt(r.hess_x_sup_error) + ',' + opt(r.hess_mu_sup_error) + ',' +
           format_double(r.grad_max_std_error) + ',' + opt(r.hess_max_std_error) + '\n';
  }
  return out;
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_LIONS_HPP_
