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

#ifndef WASS_SMOOTH_TRANSPORT_HPP_
#define WASS_SMOOTH_TRANSPORT_HPP_

#include <wass_smooth/measure.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wass_smooth {

/// A coupling between two discrete measures, stored densely (rows = source atoms).
struct TransportPlan {
  Matrix matrix;
  Vector source_marginal;
  Vector target_marginal;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }

  double cost(const Matrix &cost_matrix) const {
    return matrix.cwiseProduct(cost_matrix).sum();
  }

  /// Largest absolute deviation of the plan's row/column sums from the marginals.
  double marginal_violation() const {
    const double rows_err =
        (matrix.rowwise().sum() - source_marginal).cwiseAbs().maxCoeff();
    const double cols_err =
        (matrix.colwise().sum().transpose() - target_marginal).cwiseAbs().maxCoeff();
    return std::max(rows_err, cols_err);
  }
};

enum class Solver { assignment, min_cost_flow, sinkhorn, sorted_1d };

inline const char *to_string(Solver solver) {
  switch (solver) {
    case Solver::assignment:
      return "assignment";
    case Solver::min_cost_flow:
      return "min_cost_flow";
    case Solver::sinkhorn:
      return "sinkhorn";
    case Solver::sorted_1d:
      return "sorted_1d";
  }
  return "unknown";
}

enum class SolverStatus { optimal, converged, not_converged };

inline const char *to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::optimal:
      return "optimal";
    case SolverStatus::converged:
      return "converged";
    case SolverStatus::not_converged:
      return "not_converged";
  }
  return "unknown";
}

/*
 * distance is sqrt of the plan's transport cost. certified_gap bounds, in
 * squared-cost units, how far distance^2 can be above W2^2: it is the
 * primal-dual gap against a feasible dual built from the solver's
 * potentials, so W2^2 lies in [distance^2 - certified_gap, distance^2].
 */
struct W2Result {
  double distance = 0.0;
  TransportPlan plan;
  Solver solver = Solver::assignment;
  double certified_gap = 0.0;
  SolverStatus status = SolverStatus::optimal;
  double marginal_residual = 0.0;  // Sinkhorn only: L1 row-marginal error before rounding
  int iterations = 0;
};

inline Matrix squared_distance_matrix(const Matrix &xs, const Matrix &ys) {
  // |x|^2 + |y|^2 - 2 x.y loses accuracy for nearby points; go direct.
  Matrix cost(xs.cols(), ys.cols());
  for (Eigen::Index j = 0; j < ys.cols(); ++j) {
    for (Eigen::Index i = 0; i < xs.cols(); ++i) {
      cost(i, j) = (xs.col(i) - ys.col(j)).squaredNorm();
    }
  }
  return cost;
}

namespace detail {

inline void require_same_dim(const DiscreteMeasure &mu, const DiscreteMeasure &nu) {
  if (mu.dim() != nu.dim()) {
    throw InvalidInput("measures have different dimensions (" +
                       std::to_string(mu.dim()) + " vs " +
                       std::to_string(nu.dim()) + ")");
  }
}

/// Lower bound on the transport cost from source potentials f via g = f^c.
inline double dual_value(const Matrix &cost, const Vector &a, const Vector &b,
                         const Vector &f) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) > 0.0) {
      total += a(i) * f(i);
    }
  }
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b(j) <= 0.0) {
      continue;
    }
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i) > 0.0) {
        g = std::min(g, cost(i, j) - f(i));
      }
    }
    total += b(j) * g;
  }
  return total;
}

}  // namespace detail

/*
 * Min-cost perfect matching on a square cost matrix (shortest augmenting
 * paths with row/column potentials, O(n^3)). Returns the column matched to
 * each row; `row_potential` receives dual values u with u_i + v_j <= c_ij.
 */
inline std::vector<Eigen::Index> solve_assignment(const Matrix &cost,
                                                  Vector *row_potential = nullptr) {
  const auto n = cost.rows();
  if (cost.cols() != n) {
    throw InvalidInput("assignment: cost matrix must be square");
  }
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based indexing with column 0 as the virtual start.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n + 1), 0);
  std::vector<Eigen::Index> way(static_cast<std::size_t>(n + 1), 0);
  std::vector<double> min_slack(static_cast<std::size_t>(n + 1));
  std::vector<char> used(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 1; i <= n; ++i) {
    match[0] = i;
    Eigen::Index col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(col0)] = 1;
      const auto row0 = match[static_cast<std::size_t>(col0)];
      double delta = inf;
      Eigen::Index col1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          continue;
        }
        const double slack = cost(row0 - 1, j - 1) - u[static_cast<std::size_t>(row0)] - v[sj];
        if (slack < min_slack[sj]) {
          min_slack[sj] = slack;
          way[sj] = col0;
        }
        if (min_slack[sj] < delta) {
          delta = min_slack[sj];
          col1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(match[sj])] += delta;
          v[sj] -= delta;
        } else {
          min_slack[sj] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const auto col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<Eigen::Index> row_to_col(static_cast<std::size_t>(n));
  for (Eigen::Index j = 1; j <= n; ++j) {
    row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  if (row_potential != nullptr) {
    row_potential->resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      (*row_potential)(i) = u[static_cast<std::size_t>(i + 1)];
    }
  }
  return row_to_col;
}

/*
 * Exact transport between arbitrary marginals by successive shortest paths
 * on the bipartite network (Dijkstra with node potentials, dense O(V^2)
 * per search). Every augmentation exhausts a supply, a demand or a
 * residual reverse arc, so the number of rounds stays near N + M.
 */
inline TransportPlan solve_transport(const Matrix &cost, const Vector &a,
                                     const Vector &b, Vector *source_potential) {
  const auto n = cost.rows();
  const auto m = cost.cols();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix flow = Matrix::Zero(n, m);
  Vector supply = a;
  Vector demand = b;
  Vector pot_src = Vector::Zero(n);
  Vector pot_snk = Vector::Zero(m);
  Vector dist_src(n), dist_snk(m);
  std::vector<Eigen::Index> parent_src(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> parent_snk(static_cast<std::size_t>(m));
  std::vector<char> done_src(static_cast<std::size_t>(n));
  std::vector<char> done_snk(static_cast<std::size_t>(m));

  const long max_rounds = 16L * (n + m) * (n + m) + 64;
  for (long round = 0;; ++round) {
    if (round > max_rounds) {
      throw std::logic_error("solve_transport: augmentation did not terminate");
    }
    if ((supply.array() <= 0.0).all() || (demand.array() <= 0.0).all()) {
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      dist_src(i) = supply(i) > 0.0 ? 0.0 : inf;
      parent_src[static_cast<std::size_t>(i)] = -1;
    }
    dist_snk.setConstant(inf);
    std::fill(done_src.begin(), done_src.end(), 0);
    std::fill(done_snk.begin(), done_snk.end(), 0);

    Eigen::Index target = -1;
    double target_dist = inf;
    while (true) {
      // Pick the closest unfinished node (sources first on ties).
      double best = inf;
      Eigen::Index best_node = -1;
      bool best_is_source = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!done_src[static_cast<std::size_t>(i)] && dist_src(i) < best) {
          best = dist_src(i);
          best_node = i;
          best_is_source = true;
        }
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!done_snk[static_cast<std::size_t>(j)] && dist_snk(j) < best) {
          best = dist_snk(j);
          best_node = j;
          best_is_source = false;
        }
      }
      if (best_node < 0) {
        break;
      }
      if (best_is_source) {
        const auto i = best_node;
        done_src[static_cast<std::size_t>(i)] = 1;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (done_snk[static_cast<std::size_t>(j)]) {
            continue;
          }
          const double reduced = cost(i, j) + pot_src(i) - pot_snk(j);
          const double candidate = best + std::max(reduced, 0.0);
          if (candidate < dist_snk(j)) {
            dist_snk(j) = candidate;
            parent_snk[static_cast<std::size_t>(j)] = i;
          }
        }
      } else {
        const auto j = best_node;
        done_snk[static_cast<std::size_t>(j)] = 1;
        if (demand(j) > 0.0) {
          target = j;
          target_dist = best;
          break;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          if (done_src[static_cast<std::size_t>(i)] || flow(i, j) <= 0.0) {
            continue;
          }
          const double reduced = -cost(i, j) + pot_snk(j) - pot_src(i);
          const double candidate = best + std::max(reduced, 0.0);
          if (candidate < dist_src(i)) {
            dist_src(i) = candidate;
            parent_src[static_cast<std::size_t>(i)] = j;
          }
        }
      }
    }
    if (target < 0) {
      break;  // remaining supply cannot reach any remaining demand
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      pot_src(i) += std::min(dist_src(i), target_dist);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      pot_snk(j) += std::min(dist_snk(j), target_dist);
    }
    // Bottleneck along the path target <- i <- j <- ... <- root source.
    double amount = demand(target);
    Eigen::Index j = target;
    Eigen::Index root = -1;
    while (true) {
      const auto i = parent_snk[static_cast<std::size_t>(j)];
      const auto prev = parent_src[static_cast<std::size_t>(i)];
      if (prev < 0) {
        root = i;
        amount = std::min(amount, supply(i));
        break;
      }
      amount = std::min(amount, flow(i, prev));
      j = prev;
    }
    j = target;
    while (true) {
      const auto i = parent_snk[static_cast<std::size_t>(j)];
      flow(i, j) += amount;
      const auto prev = parent_src[static_cast<std::size_t>(i)];
      if (prev < 0) {
        break;
      }
      flow(i, prev) = (flow(i, prev) == amount) ? 0.0 : flow(i, prev) - amount;
      j = prev;
    }
    supply(root) = (supply(root) == amount) ? 0.0 : supply(root) - amount;
    demand(target) = (demand(target) == amount) ? 0.0 : demand(target) - amount;
  }
  if (source_potential != nullptr) {
    *source_potential = -pot_src;
  }
  return {std::move(flow), a, b};
}

/*
 * Exact W2. Uniform measures of equal size go to the assignment solver,
 * everything else to the transport solver.
 */
inline W2Result w2_exact(const DiscreteMeasure &mu, const DiscreteMeasure &nu) {
  detail::require_same_dim(mu, nu);
  const Matrix cost = squared_distance_matrix(mu.points(), nu.points());
  W2Result result;
  Vector f;
  if (mu.size() == nu.size() && mu.has_uniform_weights() && nu.has_uniform_weights()) {
    const auto n = mu.size();
    const auto match = solve_assignment(cost, &f);
    Matrix plan = Matrix::Zero(n, n);
    const double w = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      plan(i, match[static_cast<std::size_t>(i)]) = w;
    }
    result.plan = {std::move(plan), mu.weights(), nu.weights()};
    result.solver = Solver::assignment;
  } else {
    result.plan = solve_transport(cost, mu.weights(), nu.weights(), &f);
    result.solver = Solver::min_cost_flow;
  }
  const double primal = std::max(result.plan.cost(cost), 0.0);
  const double dual = detail::dual_value(cost, mu.weights(), nu.weights(), f);
  result.distance = std::sqrt(primal);
  result.certified_gap = std::max(primal - dual, 0.0);
  result.status = SolverStatus::optimal;
  return result;
}

/// Monotone matching for uniform equal-size measures on the line.
inline W2Result w2_sorted_1d(const DiscreteMeasure &mu, const DiscreteMeasure &nu) {
  if (mu.dim() != 1 || nu.dim() != 1) {
    throw InvalidInput("w2_sorted_1d: both measures must be one-dimensional");
  }
  if (mu.size() != nu.size() || !mu.has_uniform_weights() || !nu.has_uniform_weights()) {
    throw InvalidInput("w2_sorted_1d: need uniform weights and equal sizes");
  }
  const auto n = mu.size();
  std::vector<Eigen::Index> xs(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> ys(static_cast<std::size_t>(n));
  std::iota(xs.begin(), xs.end(), Eigen::Index{0});
  std::iota(ys.begin(), ys.end(), Eigen::Index{0});
  const auto &px = mu.points();
  const auto &py = nu.points();
  std::sort(xs.begin(), xs.end(),
            [&](auto l, auto r) { return px(0, l) < px(0, r); });
  std::sort(ys.begin(), ys.end(),
            [&](auto l, auto r) { return py(0, l) < py(0, r); });
  const double w = 1.0 / static_cast<double>(n);
  Matrix plan = Matrix::Zero(n, n);
  double total = 0.0;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    plan(xs[r], ys[r]) = w;
    const double diff = px(0, xs[r]) - py(0, ys[r]);
    total += diff * diff;
  }
  W2Result result;
  result.distance = std::sqrt(total * w);
  result.plan = {std::move(plan), mu.weights(), nu.weights()};
  result.solver = Solver::sorted_1d;
  return result;
}

struct SinkhornOptions {
  double epsilon = 1e-2;
  int max_iter = 100000;
  /// Stop once the L1 row-marginal error falls below this.
  double tolerance = 1e-9;
};

namespace detail {

// Altschuler-Weed-Rigollet rounding onto the transport polytope.
inline Matrix round_to_polytope(Matrix plan, const Vector &a, const Vector &b) {
  const Vector rows = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    if (rows(i) > a(i)) {
      plan.row(i) *= a(i) / rows(i);
    }
  }
  const Vector cols = plan.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    if (cols(j) > b(j)) {
      plan.col(j) *= b(j) / cols(j);
    }
  }
  const Vector err_a = (a - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector err_b = (b - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = err_a.sum();
  if (mass > 0.0) {
    plan += err_a * err_b.transpose() / mass;
  }
  return plan;
}

}  // namespace detail

/*
 * Entropic-regularized W2 in the log domain with epsilon scaling. The
 * returned distance is the transport cost of the Sinkhorn plan after
 * rounding it to an exact coupling, so it never undershoots W2; the
 * certificate is the gap to the c-transform dual of the final potentials.
 * A run that exhausts max_iter reports SolverStatus::not_converged together
 * with its marginal residual instead of throwing.
 */
inline W2Result w2_sinkhorn(const DiscreteMeasure &mu, const DiscreteMeasure &nu,
                            const SinkhornOptions &options) {
  detail::require_same_dim(mu, nu);
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    throw InvalidInput("w2_sinkhorn: epsilon must be positive");
  }
  if (options.max_iter < 1) {
    throw InvalidInput("w2_sinkhorn: max_iter must be positive");
  }
  const Matrix cost = squared_distance_matrix(mu.points(), nu.points());
  const Vector &a = mu.weights();
  const Vector &b = nu.weights();
  const auto n = a.size();
  const auto m = b.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Vector log_a = a.array().log();
  Vector log_b = b.array().log();

  Vector f = Vector::Zero(n);
  Vector g = Vector::Zero(m);
  std::vector<double> terms(static_cast<std::size_t>(std::max(n, m)));

  auto lse = [&](Eigen::Index count) {
    double top = neg_inf;
    for (Eigen::Index t = 0; t < count; ++t) {
      top = std::max(top, terms[static_cast<std::size_t>(t)]);
    }
    if (top == neg_inf) {
      return neg_inf;
    }
    double sum = 0.0;
    for (Eigen::Index t = 0; t < count; ++t) {
      sum += std::exp(terms[static_cast<std::size_t>(t)] - top);
    }
    return top + std::log(sum);
  };
  auto update_f = [&](double eps) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        terms[static_cast<std::size_t>(j)] = log_b(j) + (g(j) - cost(i, j)) / eps;
      }
      f(i) = -eps * lse(m);
    }
  };
  auto update_g = [&](double eps) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        terms[static_cast<std::size_t>(i)] = log_a(i) + (f(i) - cost(i, j)) / eps;
      }
      g(j) = -eps * lse(n);
    }
  };
  auto plan_for = [&](double eps) {
    Matrix plan(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        plan(i, j) = (a(i) > 0.0 && b(j) > 0.0)
                         ? std::exp(log_a(i) + log_b(j) + (f(i) + g(j) - cost(i, j)) / eps)
                         : 0.0;
      }
    }
    return plan;
  };
  auto row_residual = [&](double eps) {
    return (plan_for(eps).rowwise().sum() - a).cwiseAbs().sum();
  };

  const double scale = std::max(cost.maxCoeff(), options.epsilon);
  std::vector<double> schedule;
  for (double eps = scale; eps > options.epsilon; eps *= 0.5) {
    schedule.push_back(eps);
  }
  schedule.push_back(options.epsilon);

  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    const bool last = stage + 1 == schedule.size();
    const double stage_tol = last ? options.tolerance : 1e-3;
    while (iterations < options.max_iter) {
      update_f(eps);
      update_g(eps);
      ++iterations;
      residual = row_residual(eps);
      if (residual <= stage_tol) {
        break;
      }
    }
    if (iterations >= options.max_iter) {
      // Finish on the target epsilon so the potentials match the reported problem.
      if (!last) {
        update_f(options.epsilon);
        update_g(options.epsilon);
        residual = row_residual(options.epsilon);
      }
      break;
    }
  }

  W2Result result;
  Matrix plan = detail::round_to_polytope(plan_for(options.epsilon), a, b);
  const double primal = std::max(plan.cwiseProduct(cost).sum(), 0.0);
  const double dual = detail::dual_value(cost, a, b, f);
  result.distance = std::sqrt(primal);
  result.plan = {std::move(plan), a, b};
  result.solver = Solver::sinkhorn;
  result.certified_gap = std::max(primal - dual, 0.0);
  result.status = residual <= options.tolerance ? SolverStatus::converged
                                                : SolverStatus::not_converged;
  result.marginal_residual = residual;
  result.iterations = iterations;
  return result;
}

inline W2Result w2_sinkhorn(const DiscreteMeasure &mu, const DiscreteMeasure &nu,
                            double epsilon, int max_iter) {
  SinkhornOptions options;
  options.epsilon = epsilon;
  options.max_iter = max_iter;
  return w2_sinkhorn(mu, nu, options);
}

namespace detail {

inline double paired_rms(const Matrix &xs, const Matrix &ys, const char *what) {
  if (xs.cols() != ys.cols() || xs.rows() != ys.rows()) {
    throw InvalidInput(std::string(what) + ": point lists differ in length or dimension");
  }
  if (xs.cols() < 1) {
    throw InvalidInput(std::string(what) + ": need at least one point");
  }
  return std::sqrt((xs - ys).colwise().squaredNorm().mean());
}

}  // namespace detail

/*
 * sqrt((1/n) sum_i |x_i - y_i|^2): the cost of pairing x_i with y_i by
 * index, hence an upper bound on W2 between the two uniform empirical
 * measures. Valid even when x contains repeated points with different
 * partners, because the index coupling is always a coupling.
 */
inline double paired_index_bound(const Matrix &xs, const Matrix &ys) {
  return detail::paired_rms(xs, ys, "paired_index_bound");
}

/*
 * Empirical L2 norm of xi - eta for paired draws (xi_i, eta_i) of some
 * coupling of mu and nu. Estimates ||xi - eta||_{L2} >= W2(mu, nu); this is
 * a statistical estimate, not a certified bound.
 */
inline double coupling_upper_bound(const Matrix &xi, const Matrix &eta) {
  return detail::paired_rms(xi, eta, "coupling_upper_bound");
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_TRANSPORT_HPP_
