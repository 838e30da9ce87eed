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


#include <wass_smooth.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace ws = wass_smooth;
using json = nlohmann::json;

namespace {

std::string config_path(const std::string &name) {
  return std::string(WASS_SMOOTH_CONFIG_DIR) + "/" + name + ".cfg";
}

json constant_json() {
  return json::parse(ws::read_file(config_path("constant_sanity")));
}

std::vector<std::string> errors_of(const json &j) {
  try {
    ws::parse_spec(j);
  } catch (const ws::ConfigError &e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string> &errors, const std::string &needle) {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const std::string &e) { return e.find(needle) != std::string::npos; });
}

TEST(Config, MissingFunctionalIsNamed) {
  auto j = constant_json();
  j.erase("functional");
  const auto errors = errors_of(j);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_TRUE(mentions(errors, "functional")) << errors[0];
}

TEST(Config, ScheduleInvariantViolation) {
  auto j = constant_json();
  j["schedule"][1]["n"] = 0;
  EXPECT_FALSE(errors_of(j).empty());
  j = constant_json();
  j["schedule"][1]["n"] = j["schedule"][0]["n"].get<int>();
  j["schedule"][0]["n"] = 3;
  EXPECT_TRUE(mentions(errors_of(j), "n"));
}

TEST(Config, ReportsEveryError) {
  auto j = constant_json();
  j["tolerence"] = 0.1;
  j.erase("seed");
  j["gates"][0]["property"] = "speed";
  j["functional"] = "nope";
  const auto errors = errors_of(j);
  EXPECT_GE(errors.size(), 4u);
  EXPECT_TRUE(mentions(errors, "tolerence"));
  EXPECT_TRUE(mentions(errors, "seed"));
  EXPECT_TRUE(mentions(errors, "speed"));
  EXPECT_TRUE(mentions(errors, "nope"));
}

TEST(Config, CrossFieldChecks) {
  auto j = constant_json();
  j["functional"] = "w2_anchor";
  EXPECT_TRUE(mentions(errors_of(j), "Lions derivatives"));
  j = constant_json();
  j["functional"] = "quadratic_mean";
  j["gates"] = json::array({{{"property", "modulus_preservation"}, {"tolerance", 0.01}}});
  const auto errors = errors_of(j);
  EXPECT_TRUE(mentions(errors, "modulus_check"));
  EXPECT_TRUE(mentions(errors, "global modulus"));
  j = constant_json();
  j["spec_version"] = 2;
  EXPECT_TRUE(mentions(errors_of(j), "spec_version"));
}

TEST(Config, SyntaxAndIoErrors) {
  EXPECT_THROW(ws::parse_spec(std::string("{ not json")), ws::ConfigError);
  const auto missing = ws::validate_config("/nonexistent/x.cfg");
  EXPECT_FALSE(missing.ok());
  EXPECT_TRUE(mentions(missing.errors, "io"));
}

class CannedConfig : public ::testing::TestWithParam<std::string> {};

TEST_P(CannedConfig, ValidatesAndRoundTrips) {
  const auto result = ws::validate_config(config_path(GetParam()));
  ASSERT_TRUE(result.ok()) << (result.errors.empty() ? "" : result.errors[0]);
  const auto &spec = *result.spec;
  EXPECT_EQ(spec.name, GetParam());
  const auto again = ws::parse_spec(ws::serialize_spec(spec));
  EXPECT_EQ(again, spec);
  EXPECT_EQ(ws::spec_hash(again), ws::spec_hash(spec));
}

INSTANTIATE_TEST_SUITE_P(All, CannedConfig,
                         ::testing::Values("constant_sanity", "uniform_convergence_linear",
                                           "uniform_convergence_w2", "lipschitz_preservation",
                                           "derivative_convergence"));

TEST(Config, HashTracksSeedButNotThreads) {
  auto spec = ws::load_spec(config_path("constant_sanity"));
  const auto h = ws::spec_hash(spec);
  EXPECT_EQ(h.size(), 16u);
  spec.threads = 8;
  EXPECT_EQ(ws::spec_hash(spec), h);
  spec.seed += 1;
  EXPECT_NE(ws::spec_hash(spec), h);
}

TEST(Run, ConstantSanityPasses) {
  const auto spec = ws::load_spec(config_path("constant_sanity"));
  const auto rec = ws::run_experiment(spec);
  EXPECT_TRUE(rec.all_passed()) << ws::record_summary(rec);
  ASSERT_EQ(rec.gates.size(), 3u);
  for (const auto &r : rec.convergence) {
    EXPECT_EQ(r.sup_error, 0.0);
  }
  for (const auto &r : rec.derivatives) {
    EXPECT_EQ(r.grad_sup_error, 0.0);
    EXPECT_EQ(r.hess_x_sup_error.value_or(-1.0), 0.0);
  }
}

TEST(Run, FailingGateIsReported) {
  auto spec = ws::load_spec(config_path("uniform_convergence_linear"));
  spec.schedule = {{1, 1, 1, 20}};
  spec.gates[0].tolerance = 0.0;
  const auto rec = ws::run_experiment(spec);
  EXPECT_FALSE(rec.all_passed());
  EXPECT_GT(rec.gates[0].observed, 0.0);
}

TEST(Run, MetricsAreReproducibleAndThreadIndependent) {
  auto spec = ws::load_spec(config_path("uniform_convergence_w2"));
  spec.schedule = {{1, 1, 1, 4}, {2, 4, 4, 8}};
  const auto a = ws::record_metrics_json(ws::run_experiment(spec)).dump();
  const auto b = ws::record_metrics_json(ws::run_experiment(spec)).dump();
  spec.threads = 4;
  const auto threaded = ws::record_metrics_json(ws::run_experiment(spec)).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, threaded);
}

TEST(Run, WritesOutputsHonouringEnvironment) {
  auto spec = ws::load_spec(config_path("constant_sanity"));
  const auto rec = ws::run_experiment(spec);
  const auto base = std::filesystem::temp_directory_path() / "wass_smooth_harness_test";
  std::filesystem::remove_all(base);
  EXPECT_EQ(ws::resolve_output_dir(spec, ""), spec.output_path);
  EXPECT_EQ(ws::resolve_output_dir(spec, (base / "cli").string()), base / "cli");
  ::setenv("WASS_SMOOTH_OUT_DIR", (base / "env").c_str(), 1);
  const auto dir = ws::resolve_output_dir(spec, (base / "cli").string());
  ::unsetenv("WASS_SMOOTH_OUT_DIR");
  EXPECT_EQ(dir, base / "env");
  const auto written = ws::write_outputs(rec, dir);
  EXPECT_EQ(written.size(), 4u);
  for (const auto &p : written) {
    EXPECT_TRUE(std::filesystem::exists(p)) << p;
  }
  const auto record = json::parse(ws::read_file((dir / "constant_sanity.record.json").string()));
  EXPECT_EQ(record["spec_hash"], ws::spec_hash(spec));
  EXPECT_TRUE(record.contains("wall_clock_seconds"));
  std::filesystem::remove_all(base);
}

}  // namespace
