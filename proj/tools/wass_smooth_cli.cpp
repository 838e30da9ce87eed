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

// wass-smooth: command-line front end.
//
//   wass-smooth run <config.cfg> [--seed N] [--out DIR] [--threads T]
//   wass-smooth validate <config.cfg>
//   wass-smooth w2 a.csv b.csv [--solver exact|sinkhorn|sorted1d]
//   wass-smooth smooth --functional NAME --measure SRC --k K --n N --m M --reps R
//   wass-smooth converge --functional NAME --ks 1,2,4 [--base-reps B]
//   wass-smooth deriv --functional NAME --order 1|2 --measure SRC --probe X [--probe Z]
//
// Exit status: 0 success, 1 a gate failed, 2 bad input.

#include <wass_smooth.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace ws = wass_smooth;
using json = nlohmann::ordered_json;

namespace {

json config_json(const ws::SmoothingConfig &cfg) {
  return {{"k", cfg.k},
          {"n", cfg.n},
          {"m", cfg.m},
          {"reps", cfg.mc_reps},
          {"seed", cfg.rng.seed},
          {"support_factor", cfg.support_factor}};
}

json vector_json(const ws::Vector &v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_json(const ws::Matrix &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(vector_json(m.row(i).transpose()));
  }
  return rows;
}

std::vector<int> parse_ks(const std::string &text) {
  std::vector<int> ks;
  for (auto part : ws::split(text, ',')) {
    ks.push_back(static_cast<int>(ws::parse_double(part)));
  }
  return ks;
}

// Exact derivatives need the measure itself, so generators are sampled once.
ws::DiscreteMeasure as_cloud(const ws::MeasureSource &source, Eigen::Index atoms,
                             std::uint64_t seed) {
  if (const auto *cloud = std::get_if<ws::DiscreteMeasure>(&source)) {
    return *cloud;
  }
  return ws::sample_empirical(std::get<ws::MeasureGenerator>(source), atoms,
                              ws::RngStream{seed, 0xC10D});
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Smoothing of functionals on the 2-Wasserstein space"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // run
  auto *run = app.add_subcommand("run", "Run an experiment config and evaluate its gates");
  std::string spec_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir;
  run->add_option("config", spec_path, "Experiment config (.cfg)")->required();
  run->add_option("--seed", seed_override, "Override the config seed");
  run->add_option("--out", out_dir, "Output directory");

  auto *validate = app.add_subcommand("validate", "Check an experiment config");
  validate->add_option("config", spec_path, "Experiment config (.cfg)")->required();

  // w2
  auto *w2 = app.add_subcommand("w2", "W2 distance between two particle-cloud CSVs");
  std::string csv_a, csv_b, solver = "exact";
  double epsilon = ws::SinkhornOptions{}.epsilon;
  int max_iter = ws::SinkhornOptions{}.max_iter;
  w2->add_option("a", csv_a)->required();
  w2->add_option("b", csv_b)->required();
  w2->add_option("--solver", solver)->check(CLI::IsMember({"exact", "sinkhorn", "sorted1d"}));
  w2->add_option("--epsilon", epsilon)->check(CLI::PositiveNumber);
  w2->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);

  // smooth
  auto *smooth = app.add_subcommand("smooth", "Monte-Carlo estimate of v_{k,n,m}(mu)");
  std::string functional = "linear_sin";
  std::string measure = "gaussian:mean=0,0;sd=1";
  int k = 2, m = 4;
  long n = 16, reps = 1000;
  std::uint64_t seed = 1;
  double support_factor = ws::kDefaultSupportFactor;
  for (auto *sub : {smooth, app.add_subcommand("deriv", "Derivatives of v_{k,n,m}")}) {
    sub->add_option("--functional", functional)->check(CLI::IsMember(ws::zoo_names()));
    sub->add_option("--measure", measure, "CSV path or gaussian:/uniform:/dirac: spec");
    sub->add_option("--k", k)->check(CLI::PositiveNumber);
    sub->add_option("--n", n)->check(CLI::PositiveNumber);
    sub->add_option("--m", m)->check(CLI::PositiveNumber);
    sub->add_option("--reps", reps)->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed);
    sub->add_option("--support-factor", support_factor);
  }
  auto *deriv = app.get_subcommand("deriv");
  int order = 1;
  std::vector<std::string> probe_text;
  std::string deriv_ks;
  long atoms = 256;
  deriv->add_option("--order", order)->check(CLI::IsMember({1, 2}));
  deriv->add_option("--probe", probe_text, "Probe point x (and z for order 2), e.g. 0.5,0")
      ->required();
  deriv->add_option("--ks", deriv_ks, "Also sweep n=m=k^2 over these k and print CSV");
  deriv->add_option("--atoms", atoms, "Atoms drawn when --measure is a generator");

  // converge
  auto *converge = app.add_subcommand("converge", "Uniform-convergence curve on the compact family");
  std::string ks_text = "1,2,4,8";
  long base_reps = 10;
  long dim = 2;
  converge->add_option("--functional", functional)->check(CLI::IsMember(ws::zoo_names()));
  converge->add_option("--ks", ks_text);
  converge->add_option("--base-reps", base_reps)->check(CLI::PositiveNumber);
  converge->add_option("--dim", dim)->check(CLI::PositiveNumber);
  converge->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || validate->parsed()) {
      auto result = ws::validate_config(spec_path);
      if (!result.ok()) {
        for (const auto &e : result.errors) {
          std::cerr << spec_path << ": " << e << '\n';
        }
        return 2;
      }
      if (validate->parsed()) {
        std::cout << spec_path << ": ok (hash " << ws::spec_hash(*result.spec) << ")\n";
        return 0;
      }
      auto spec = *result.spec;
      if (seed_override) {
        spec.seed = *seed_override;
      }
      if (app.get_option("--threads")->count() > 0) {
        spec.threads = threads;
      }
      const auto record = ws::run_experiment(spec);
      for (const auto &path : ws::write_outputs(record, ws::resolve_output_dir(spec, out_dir))) {
        std::cerr << "wrote " << path.string() << '\n';
      }
      std::cout << ws::record_summary(record);
      return record.all_passed() ? 0 : 1;
    }

    if (w2->parsed()) {
      const auto a = ws::load_csv(csv_a);
      const auto b = ws::load_csv(csv_b);
      ws::W2Result r;
      if (solver == "exact") {
        r = ws::w2_exact(a, b);
      } else if (solver == "sorted1d") {
        r = ws::w2_sorted_1d(a, b);
      } else {
        r = ws::w2_sinkhorn(a, b, ws::SinkhornOptions{epsilon, max_iter});
      }
      json out = {{"distance", r.distance},
                  {"certified_gap", r.certified_gap},
                  {"solver", ws::to_string(r.solver)},
                  {"status", ws::to_string(r.status)},
                  {"marginal_residual", r.marginal_residual},
                  {"iterations", r.iterations}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (smooth->parsed()) {
      const auto u = ws::make_zoo_functional(functional, ws::source_dim(ws::parse_measure_source(measure)));
      ws::SmoothingConfig cfg;
      cfg.k = k;
      cfg.n = n;
      cfg.m = m;
      cfg.mc_reps = reps;
      cfg.rng = ws::RngStream{seed, 0};
      cfg.threads = threads;
      cfg.support_factor = support_factor;
      const auto est = ws::eval_v_knm(u, cfg, ws::parse_measure_source(measure));
      json out = {{"functional", functional},
                  {"value", est.value},
                  {"std_error", est.std_error},
                  {"config", config_json(cfg)}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (converge->parsed()) {
      const auto u = ws::make_zoo_functional(functional, dim);
      const auto schedule = ws::DiagonalSchedule::quadratic(parse_ks(ks_text), base_reps);
      ws::CompactFamilySpec family_spec;
      family_spec.dim = dim;
      const auto rows = ws::convergence_curve(u, schedule, ws::make_compact_family(family_spec),
                                              ws::RngStream{seed, 0}, threads);
      std::cout << ws::convergence_csv(rows);
      return 0;
    }

    if (deriv->parsed()) {
      const auto cloud = as_cloud(ws::parse_measure_source(measure), atoms, seed);
      const auto u = ws::make_zoo_functional(functional, cloud.dim());
      if (order == 2 && probe_text.size() != 2) {
        std::cerr << "deriv --order 2 needs two --probe points (x and z)\n";
        return 2;
      }
      const ws::Vector x = ws::parse_vector(probe_text.front());
      const ws::Vector z = ws::parse_vector(probe_text.back());
      ws::SmoothingConfig cfg;
      cfg.k = k;
      cfg.n = n;
      cfg.m = m;
      cfg.mc_reps = reps;
      cfg.rng = ws::RngStream{seed, 0};
      cfg.threads = threads;
      cfg.support_factor = support_factor;
      json rec = {{"functional", functional}, {"x", vector_json(x)}};
      if (order == 1) {
        const auto est = ws::grad_v_knm(u, cfg, cloud, x);
        rec["grad"] = vector_json(est.grad);
        rec["grad_std_error"] = vector_json(est.grad_se);
        rec["exact_grad"] = vector_json(u.lions_grad(cloud, x));
      } else {
        const auto est = ws::hess_v_knm(u, cfg, cloud, x, z);
        rec["z"] = vector_json(z);
        rec["grad"] = vector_json(est.grad);
        rec["grad_std_error"] = vector_json(est.grad_se);
        rec["hess_x"] = matrix_json(*est.hess_x);
        rec["hess_x_std_error"] = matrix_json(*est.hess_x_se);
        rec["hess_x_correction"] = matrix_json(*est.hess_x_correction);
        rec["hess_mu"] = matrix_json(*est.hess_mu);
        rec["hess_mu_std_error"] = matrix_json(*est.hess_mu_se);
        rec["exact_hess_x"] = matrix_json(u.lions_hess_x(cloud, x));
        rec["exact_hess_mu"] = matrix_json(u.lions_hess_mu(cloud, x, z));
      }
      rec["config"] = config_json(cfg);
      std::cout << rec.dump(2) << '\n';
      if (!deriv_ks.empty()) {
        ws::DerivativeProbe probe{cloud, x, std::nullopt};
        if (order == 2) {
          probe.z = z;
        }
        const auto schedule =
            ws::DiagonalSchedule::quadratic(parse_ks(deriv_ks), std::max(1L, reps / 100));
        std::cout << ws::derivative_csv(ws::derivative_convergence_experiment(
            u, schedule, {probe}, ws::RngStream{seed, 1}, threads, support_factor));
      }
      return 0;
    }
  } catch (const ws::ConfigError &e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
