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

#ifndef WASS_SMOOTH_SMOOTHING_HPP_
#define WASS_SMOOTH_SMOOTHING_HPP_

#include <wass_smooth/functional.hpp>
#include <wass_smooth/measure.hpp>
#include <wass_smooth/measure_io.hpp>
#include <wass_smooth/parallel.hpp>
#include <wass_smooth/rng.hpp>
#include <wass_smooth/transport.hpp>
#include <wass_smooth/truncation.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace wass_smooth {

/*
 * Parameters of the Monte-Carlo estimator of v_{k,n,m}:
 *   v_{k,n,m}(mu) = E[(u * gamma_k)((1/n) sum_i delta_{xi_i - Z_i})]
 * with xi_i i.i.d. ~ mu and Z_i i.i.d. N(0, I_d / m^2), independent.
 *
 * Replicate r uses stream rng.substream(r); inside it, the samples xi come
 * from substream(0) and the noise Z from substream(1). v_{k,n} and
 * v_{k,n,m} evaluated with the same rng therefore share their xi draws.
 */
struct SmoothingConfig {
  int k = 1;
  Eigen::Index n = 1;
  int m = 1;
  long mc_reps = 1;
  RngStream rng;
  double support_factor = kDefaultSupportFactor;
  int threads = 1;

  double noise_stddev() const { return 1.0 / static_cast<double>(m); }

  void validate() const {
    if (k < 1 || n < 1 || m < 1 || mc_reps < 1) {
      throw InvalidInput("smoothing config: k, n, m and mc_reps must all be >= 1");
    }
  }
};

struct SmoothedEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample stddev of the replicates / sqrt(M)
  SmoothingConfig config;
};

namespace detail {

inline double smoothing_replicate(const Functional &truncated, const MeasureSource &mu,
                                  Eigen::Index n, double noise_sd,
                                  const RngStream &stream) {
  Matrix points(source_dim(mu), n);
  PhiloxEngine xi_engine(stream.substream(0));
  draw_samples(mu, xi_engine, points);
  if (noise_sd > 0.0) {
    PhiloxEngine z_engine(stream.substream(1));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < points.rows(); ++j) {
        points(j, i) -= noise_sd * z_engine.normal();
      }
    }
  }
  return truncated.eval(DiscreteMeasure::uniform(std::move(points)));
}

}  // namespace detail

/*
 * The M replicate values behind an estimate, in replicate order. Pass
 * with_noise = false for v_{k,n}.
 */
inline std::vector<double> smoothing_replicates(const Functional &u,
                                                const SmoothingConfig &cfg,
                                                const MeasureSource &mu,
                                                bool with_noise = true) {
  cfg.validate();
  if (!u.eval) {
    throw InvalidInput("functional '" + u.name + "' cannot be evaluated");
  }
  const Functional truncated =
      truncate_functional(u, TruncationMap(source_dim(mu), cfg.k, cfg.support_factor));
  const double noise_sd = with_noise ? cfg.noise_stddev() : 0.0;
  std::vector<double> values(static_cast<std::size_t>(cfg.mc_reps));
  parallel_for(values.size(), cfg.threads, [&](std::size_t r) {
    values[r] = detail::smoothing_replicate(truncated, mu, cfg.n, noise_sd,
                                            cfg.rng.substream(r));
  });
  return values;
}

inline SmoothedEstimate estimate_from(const std::vector<double> &replicates,
                                      const SmoothingConfig &cfg) {
  const auto stats = summarize(replicates);
  return {stats.mean(), stats.std_error(), cfg};
}

/// Monte-Carlo estimate of v_{k,n,m}(mu).
inline SmoothedEstimate eval_v_knm(const Functional &u, const SmoothingConfig &cfg,
                                   const MeasureSource &mu) {
  return estimate_from(smoothing_replicates(u, cfg, mu, true), cfg);
}

/// Monte-Carlo estimate of v_{k,n}(mu) = E[(u * gamma_k)(empirical_n(mu))].
inline SmoothedEstimate eval_v_kn(const Functional &u, int k, Eigen::Index n,
                                  const MeasureSource &mu, long mc_reps,
                                  const RngStream &rng, int threads = 1) {
  SmoothingConfig cfg;
  cfg.k = k;
  cfg.n = n;
  cfg.mc_reps = mc_reps;
  cfg.rng = rng;
  cfg.threads = threads;
  return estimate_from(smoothing_replicates(u, cfg, mu, false), cfg);
}

// ---------------------------------------------------------------------------
// Diagonal schedule

struct ScheduleEntry {
  int k = 1;
  Eigen::Index n = 1;
  int m = 1;
  long reps = 1;

  friend bool operator==(const ScheduleEntry &, const ScheduleEntry &) = default;
};

/*
 * Explicit (k, n_k, m_k) sequence standing in for a diagonal subsequence:
 * k strictly increasing, n_k and m_k non-decreasing.
 */
class DiagonalSchedule {
 public:
  DiagonalSchedule() = default;
  explicit DiagonalSchedule(std::vector<ScheduleEntry> entries)
      : entries_(std::move(entries)) {
    const auto problems = violations(entries_);
    if (!problems.empty()) {
      throw InvalidInput(problems.front());
    }
  }

  /// n_k = k^2, m_k = k^2, reps_k = base_reps * k^2.
  static DiagonalSchedule quadratic(const std::vector<int> &ks, long base_reps) {
    std::vector<ScheduleEntry> entries;
    for (int k : ks) {
      const long k2 = static_cast<long>(k) * k;
      entries.push_back({k, static_cast<Eigen::Index>(k2), static_cast<int>(k2),
                         base_reps * k2});
    }
    return DiagonalSchedule(std::move(entries));
  }

  /// Every invariant violation, in entry order.
  static std::vector<std::string> violations(const std::vector<ScheduleEntry> &entries) {
    std::vector<std::string> problems;
    if (entries.empty()) {
      problems.emplace_back("schedule is empty");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto &e = entries[i];
      const std::string at = "schedule[" + std::to_string(i) + "]";
      if (e.k < 1 || e.n < 1 || e.m < 1 || e.reps < 1) {
        problems.push_back(at + ": k, n, m and reps must be >= 1");
      }
      if (i == 0) {
        continue;
      }
      const auto &prev = entries[i - 1];
      if (e.k <= prev.k) {
        problems.push_back(at + ": k must be strictly increasing");
      }
      if (e.n < prev.n) {
        problems.push_back(at + ": n_k must be non-decreasing");
      }
      if (e.m < prev.m) {
        problems.push_back(at + ": m_k must be non-decreasing");
      }
    }
    return problems;
  }

  const std::vector<ScheduleEntry> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const ScheduleEntry &at_k(int k) const {
    for (const auto &e : entries_) {
      if (e.k == k) {
        return e;
      }
    }
    throw InvalidInput("no schedule entry for k = " + std::to_string(k));
  }

 private:
  std::vector<ScheduleEntry> entries_;
};

inline SmoothingConfig config_for(const ScheduleEntry &entry, const RngStream &rng,
                                  int threads = 1,
                                  double support_factor = kDefaultSupportFactor) {
  SmoothingConfig cfg;
  cfg.support_factor = support_factor;
  cfg.k = entry.k;
  cfg.n = entry.n;
  cfg.m = entry.m;
  cfg.mc_reps = entry.reps;
  cfg.rng = rng;
  cfg.threads = threads;
  return cfg;
}

/// u_k(mu) = v_{k, n_k, m_k}(mu) with the schedule's replicate count.
inline SmoothedEstimate eval_u_k(const Functional &u, const DiagonalSchedule &schedule,
                                 int k, const MeasureSource &mu, const RngStream &rng,
                                 int threads = 1) {
  return eval_v_knm(u, config_for(schedule.at_k(k), rng, threads), mu);
}

// ---------------------------------------------------------------------------
// Modulus preservation

struct ModulusReport {
  long pairs = 0;
  long violations = 0;
  double sigma_multiplier = 3.0;
  double min_margin = 0.0;
  std::vector<double> margins;  // w(W2) + z (se_mu + se_nu) - |v(mu) - v(nu)|

  double violation_fraction() const {
    return pairs > 0 ? static_cast<double>(violations) / static_cast<double>(pairs) : 0.0;
  }
};

/*
 * Random pair for the preservation gate. Half the pairs are a measure and a
 * small translate of it (where Lipschitz bounds are nearly tight for
 * linear functionals); the rest are independent clouds.
 */
inline std::pair<DiscreteMeasure, DiscreteMeasure> random_measure_pair(
    Eigen::Index dim, Eigen::Index max_atoms, const RngStream &rng) {
  PhiloxEngine engine(rng);
  auto cloud = [&]() {
    const auto count =
        1 + static_cast<Eigen::Index>(engine.below(static_cast<std::uint64_t>(max_atoms)));
    Vector center(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      center(j) = engine.normal();
    }
    const double spread = 0.2 + 1.3 * engine.uniform();
    Matrix pts(dim, count);
    for (Eigen::Index i = 0; i < count; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        pts(j, i) = center(j) + spread * engine.normal();
      }
    }
    return DiscreteMeasure::uniform(std::move(pts));
  };
  DiscreteMeasure mu = cloud();
  if (engine.uniform() < 0.5) {
    Vector shift(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      shift(j) = 0.3 * engine.normal();
    }
    Matrix moved = mu.points().colwise() + shift;
    return {mu, DiscreteMeasure(std::move(moved), mu.weights())};
  }
  return {std::move(mu), cloud()};
}

/*
 * Statistical check that v_{k,n,m} keeps the modulus w of u: for each
 * random pair, |v(mu) - v(nu)| <= w(W2(mu, nu)) + z (se_mu + se_nu).
 * Only global moduli are accepted.
 */
inline ModulusReport modulus_preservation_check(const Functional &u,
                                                const SmoothingConfig &cfg,
                                                long pair_count, const RngStream &rng,
                                                Eigen::Index dim = 2,
                                                Eigen::Index max_atoms = 32,
                                                double sigma_multiplier = 3.0) {
  if (!u.modulus) {
    throw InvalidInput("modulus_preservation_check: '" + u.name + "' has no modulus");
  }
  if (!u.modulus->is_global()) {
    throw InvalidInput("modulus_preservation_check: modulus of '" + u.name +
                       "' is only valid on a bounded set");
  }
  ModulusReport report;
  report.pairs = pair_count;
  report.sigma_multiplier = sigma_multiplier;
  report.margins.reserve(static_cast<std::size_t>(pair_count));
  for (long p = 0; p < pair_count; ++p) {
    const RngStream pair_stream = rng.substream(static_cast<std::uint64_t>(p));
    const auto [mu, nu] = random_measure_pair(dim, max_atoms, pair_stream.substream(0));
    SmoothingConfig cfg_mu = cfg;
    cfg_mu.rng = pair_stream.substream(1);
    SmoothingConfig cfg_nu = cfg;
    cfg_nu.rng = pair_stream.substream(2);
    const auto v_mu = eval_v_knm(u, cfg_mu, mu);
    const auto v_nu = eval_v_knm(u, cfg_nu, nu);
    const double bound = (*u.modulus)(w2_exact(mu, nu).distance);
    const double margin = bound + sigma_multiplier * (v_mu.std_error + v_nu.std_error) -
                          std::abs(v_mu.value - v_nu.value);
    report.margins.push_back(margin);
    if (margin < 0.0) {
      ++report.violations;
    }
  }
  report.min_margin = report.margins.empty()
                          ? 0.0
                          : *std::min_element(report.margins.begin(), report.margins.end());
  return report;
}

// ---------------------------------------------------------------------------
// Compact families and convergence curves

/*
 * Finite compact test family: isotropic Gaussian clouds with means on a
 * grid x grid lattice in [-mean_radius, mean_radius]^2 (first two
 * coordinates; a line when d = 1) and variances spread evenly over
 * [var_min, var_max] along the family.
 */
struct CompactFamilySpec {
  Eigen::Index dim = 2;
  int grid = 5;
  double mean_radius = 1.4;
  double var_min = 0.25;
  double var_max = 1.0;
  Eigen::Index atoms = 64;
  std::uint64_t seed = 20240601;

  friend bool operator==(const CompactFamilySpec &, const CompactFamilySpec &) = default;
};

inline std::vector<DiscreteMeasure> make_compact_family(const CompactFamilySpec &spec) {
  if (spec.dim < 1 || spec.grid < 1 || spec.atoms < 1 || spec.var_min < 0.0 ||
      spec.var_max < spec.var_min) {
    throw InvalidInput("compact family: invalid parameters");
  }
  std::vector<Vector> means;
  auto coord = [&](int i) {
    return spec.grid == 1 ? 0.0
                          : -spec.mean_radius +
                                2.0 * spec.mean_radius * i / (spec.grid - 1);
  };
  if (spec.dim == 1) {
    for (int i = 0; i < spec.grid; ++i) {
      means.push_back(Vector::Constant(1, coord(i)));
    }
  } else {
    for (int i = 0; i < spec.grid; ++i) {
      for (int j = 0; j < spec.grid; ++j) {
        Vector m = Vector::Zero(spec.dim);
        m(0) = coord(i);
        m(1) = coord(j);
        means.push_back(m);
      }
    }
  }
  std::vector<DiscreteMeasure> family;
  const auto count = means.size();
  for (std::size_t q = 0; q < count; ++q) {
    const double var =
        count == 1 ? spec.var_min
                   : spec.var_min + (spec.var_max - spec.var_min) *
                                        static_cast<double>(q) / static_cast<double>(count - 1);
    const auto gen = MeasureGenerator::isotropic_gaussian(means[q], std::sqrt(var));
    family.push_back(sample_empirical(gen, spec.atoms, RngStream{spec.seed, q}));
  }
  return family;
}

struct ConvergenceRow {
  ScheduleEntry entry;
  double sup_error = 0.0;
  double mean_std_error = 0.0;
  double max_std_error = 0.0;
};

/*
 * sup over the family of |u_k(mu) - u(mu)| for every schedule entry.
 * Entry e and family member q use stream rng.substream(e).substream(q).
 */
inline std::vector<ConvergenceRow> convergence_curve(
    const Functional &u, const DiagonalSchedule &schedule,
    const std::vector<DiscreteMeasure> &family, const RngStream &rng, int threads = 1,
    double support_factor = kDefaultSupportFactor) {
  std::vector<double> exact;
  exact.reserve(family.size());
  for (const auto &mu : family) {
    exact.push_back(u.eval(mu));
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t e = 0; e < schedule.size(); ++e) {
    const auto &entry = schedule.entries()[e];
    ConvergenceRow row;
    row.entry = entry;
    RunningStats se_stats;
    for (std::size_t q = 0; q < family.size(); ++q) {
      const auto est = eval_v_knm(
          u, config_for(entry, rng.substream(e).substream(q), threads, support_factor),
          family[q]);
      row.sup_error = std::max(row.sup_error, std::abs(est.value - exact[q]));
      row.max_std_error = std::max(row.max_std_error, est.std_error);
      se_stats.add(est.std_error);
    }
    row.mean_std_error = se_stats.mean();
    rows.push_back(row);
  }
  return rows;
}

/// values[i+1] <= values[i] + z (se[i] + se[i+1]) for every i.
inline bool non_increasing_within_noise(const std::vector<double> &values,
                                        const std::vector<double> &std_errors, double z) {
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i + 1] > values[i] + z * (std_errors[i] + std_errors[i + 1])) {
      return false;
    }
  }
  return true;
}

/// CSV with columns k,n,m,sup_error,mean_std_error.
inline std::string convergence_csv(const std::vector<ConvergenceRow> &rows) {
  std::string out = "k,n,m,sup_error,mean_std_error\n";
  for (const auto &r : rows) {
    out += std::to_string(r.entry.k) + ',' + std::to_string(r.entry.n) + ',' +
           std::to_string(r.entry.m) + ',' + format_double(r.sup_error) + ',' +
           format_double(r.mean_std_error) + '\n';
  }
  return out;
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_SMOOTHING_HPP_
