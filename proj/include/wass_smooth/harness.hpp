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

#ifndef WASS_SMOOTH_HARNESS_HPP_
#define WASS_SMOOTH_HARNESS_HPP_

#include <wass_smooth/lions.hpp>
#include <wass_smooth/measure_io.hpp>
#include <wass_smooth/smoothing.hpp>
#include <wass_smooth/zoo.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace wass_smooth {

inline constexpr int kSpecVersion = 1;

/*
 * Experiment description, stored as a JSON document (conventionally with a
 * .cfg extension). Unknown keys are rejected so that a misspelt tolerance
 * can never silently fall back to a default.
 *
 * Randomness: a single root stream RngStream{seed, 0}. The convergence
 * curve uses root.substream(0), the modulus check root.substream(1), the
 * derivative sweep root.substream(2) and probe construction
 * root.substream(3).
 */
struct GateSpec {
  std::string property;     // see gate_properties()
  double tolerance = 0.0;
  double confidence = 3.0;  // sigma multiplier for noise allowances

  friend bool operator==(const GateSpec &, const GateSpec &) = default;
};

struct ModulusCheckSpec {
  long pairs = 500;
  int k = 2;
  Eigen::Index n = 4;
  int m = 2;
  long reps = 2000;
  Eigen::Index max_atoms = 32;

  friend bool operator==(const ModulusCheckSpec &, const ModulusCheckSpec &) = default;
};

/// Probes (mu, x, z): mu cycles through the compact family, x and z are uniform in [-box, box]^d.
struct ProbeSpec {
  int count = 10;
  double box = 1.0;

  friend bool operator==(const ProbeSpec &, const ProbeSpec &) = default;
};

struct ExperimentSpec {
  int spec_version = kSpecVersion;
  std::string name;
  std::string functional;
  Eigen::Index dim = 2;
  std::uint64_t seed = 0;
  int threads = 1;
  double support_factor = kDefaultSupportFactor;
  CompactFamilySpec compact_family;
  std::vector<ScheduleEntry> schedule;
  std::vector<GateSpec> gates;
  std::optional<ModulusCheckSpec> modulus_check;
  std::optional<ProbeSpec> probes;
  std::string output_path;

  friend bool operator==(const ExperimentSpec &, const ExperimentSpec &) = default;
};

inline const std::vector<std::string> &gate_properties() {
  static const std::vector<std::string> names = {
      "uniform_convergence", "modulus_preservation", "derivative_first",
      "derivative_second"};
  return names;
}

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string> &errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string> &errors) {
    std::string out = "invalid experiment config:";
    for (const auto &e : errors) {
      out += "\n  " + e;
    }
    return out;
  }

  std::vector<std::string> errors_;
};

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json spec_to_json(const ExperimentSpec &spec) {
  nlohmann::ordered_json j;
  j["spec_version"] = spec.spec_version;
  j["name"] = spec.name;
  j["functional"] = spec.functional;
  j["dim"] = spec.dim;
  j["seed"] = spec.seed;
  j["threads"] = spec.threads;
  j["support_factor"] = spec.support_factor;
  const auto &f = spec.compact_family;
  j["compact_family"] = {{"grid", f.grid},         {"mean_radius", f.mean_radius},
                         {"var_min", f.var_min},   {"var_max", f.var_max},
                         {"atoms", f.atoms},       {"seed", f.seed}};
  j["schedule"] = nlohmann::ordered_json::array();
  for (const auto &e : spec.schedule) {
    j["schedule"].push_back({{"k", e.k}, {"n", e.n}, {"m", e.m}, {"reps", e.reps}});
  }
  j["gates"] = nlohmann::ordered_json::array();
  for (const auto &g : spec.gates) {
    j["gates"].push_back(
        {{"property", g.property}, {"tolerance", g.tolerance}, {"confidence", g.confidence}});
  }
  if (spec.modulus_check) {
    const auto &mc = *spec.modulus_check;
    j["modulus_check"] = {{"pairs", mc.pairs}, {"k", mc.k},       {"n", mc.n},
                          {"m", mc.m},         {"reps", mc.reps}, {"max_atoms", mc.max_atoms}};
  }
  if (spec.probes) {
    j["probes"] = {{"count", spec.probes->count}, {"box", spec.probes->box}};
  }
  j["output_path"] = spec.output_path;
  return j;
}

inline std::string serialize_spec(const ExperimentSpec &spec) {
  return spec_to_json(spec).dump(2) + "\n";
}

namespace detail {

/// Collects schema problems for one JSON object without stopping at the first.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json &object, std::string where,
               std::vector<std::string> &errors)
      : object_(object), where_(std::move(where)), errors_(errors) {}

  bool present(const std::string &key) {
    seen_.insert(key);
    return object_.contains(key);
  }

  template <typename T>
  void integer(const std::string &key, T &out, bool required, long long min_value) {
    if (!present(key)) {
      missing(key, required);
      return;
    }
    const auto &v = object_.at(key);
    if (!v.is_number_integer()) {
      errors_.push_back(path(key) + ": expected an integer");
      return;
    }
    if (v.is_number_unsigned()) {
      const auto u = v.get<unsigned long long>();
      if (min_value > 0 && u < static_cast<unsigned long long>(min_value)) {
        errors_.push_back(path(key) + ": must be >= " + std::to_string(min_value));
        return;
      }
      out = static_cast<T>(u);
      return;
    }
    const auto s = v.get<long long>();
    if (s < min_value) {
      errors_.push_back(path(key) + ": must be >= " + std::to_string(min_value));
      return;
    }
    out = static_cast<T>(s);
  }

  void real(const std::string &key, double &out, bool required) {
    if (!present(key)) {
      missing(key, required);
      return;
    }
    const auto &v = object_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      errors_.push_back(path(key) + ": expected a finite number");
      return;
    }
    out = v.get<double>();
  }

  void text(const std::string &key, std::string &out, bool required) {
    if (!present(key)) {
      missing(key, required);
      return;
    }
    const auto &v = object_.at(key);
    if (!v.is_string()) {
      errors_.push_back(path(key) + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  const nlohmann::json *child(const std::string &key, bool required, bool want_array) {
    if (!present(key)) {
      missing(key, required);
      return nullptr;
    }
    const auto &v = object_.at(key);
    if (want_array ? !v.is_array() : !v.is_object()) {
      errors_.push_back(path(key) + (want_array ? ": expected an array" : ": expected an object"));
      return nullptr;
    }
    return &v;
  }

  void reject_unknown() {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.count(it.key())) {
        errors_.push_back(path(it.key()) + ": unknown key");
      }
    }
  }

  std::string path(const std::string &key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

 private:
  void missing(const std::string &key, bool required) {
    if (required) {
      errors_.push_back(path(key) + ": missing required key");
    }
  }

  const nlohmann::json &object_;
  std::string where_;
  std::vector<std::string> &errors_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Parses and validates; every problem found is reported.
inline ExperimentSpec parse_spec(const nlohmann::json &j) {
  std::vector<std::string> errors;
  ExperimentSpec spec;
  if (!j.is_object()) {
    throw ConfigError({"top level: expected an object"});
  }
  detail::ObjectReader top(j, "", errors);
  top.integer("spec_version", spec.spec_version, true, 1);
  if (j.contains("spec_version") && j["spec_version"].is_number_integer() &&
      spec.spec_version != kSpecVersion) {
    errors.push_back("spec_version: unsupported version " + std::to_string(spec.spec_version));
  }
  top.text("name", spec.name, true);
  top.text("functional", spec.functional, true);
  top.integer("dim", spec.dim, true, 1);
  top.integer("seed", spec.seed, true, 0);
  top.integer("threads", spec.threads, false, 1);
  top.real("support_factor", spec.support_factor, false);
  if (!(spec.support_factor > 1.0)) {
    errors.push_back("support_factor: must exceed 1");
  }
  top.text("output_path", spec.output_path, true);

  if (const auto *family = top.child("compact_family", true, false)) {
    detail::ObjectReader r(*family, "compact_family", errors);
    auto &f = spec.compact_family;
    r.integer("grid", f.grid, false, 1);
    r.real("mean_radius", f.mean_radius, false);
    r.real("var_min", f.var_min, false);
    r.real("var_max", f.var_max, false);
    r.integer("atoms", f.atoms, false, 1);
    r.integer("seed", f.seed, false, 0);
    r.reject_unknown();
    if (f.var_min < 0.0 || f.var_max < f.var_min) {
      errors.push_back("compact_family: need 0 <= var_min <= var_max");
    }
    if (f.mean_radius < 0.0) {
      errors.push_back("compact_family.mean_radius: must be nonnegative");
    }
  }
  spec.compact_family.dim = spec.dim;

  if (const auto *schedule = top.child("schedule", true, true)) {
    for (std::size_t i = 0; i < schedule->size(); ++i) {
      const auto &item = (*schedule)[i];
      const std::string where = "schedule[" + std::to_string(i) + "]";
      if (!item.is_object()) {
        errors.push_back(where + ": expected an object");
        continue;
      }
      detail::ObjectReader r(item, where, errors);
      ScheduleEntry e;
      r.integer("k", e.k, true, 1);
      r.integer("n", e.n, true, 1);
      r.integer("m", e.m, true, 1);
      r.integer("reps", e.reps, true, 1);
      r.reject_unknown();
      spec.schedule.push_back(e);
    }
    for (auto &problem : DiagonalSchedule::violations(spec.schedule)) {
      errors.push_back(std::move(problem));
    }
  }

  if (const auto *gates = top.child("gates", true, true)) {
    for (std::size_t i = 0; i < gates->size(); ++i) {
      const auto &item = (*gates)[i];
      const std::string where = "gates[" + std::to_string(i) + "]";
      if (!item.is_object()) {
        errors.push_back(where + ": expected an object");
        continue;
      }
      detail::ObjectReader r(item, where, errors);
      GateSpec g;
      r.text("property", g.property, true);
      r.real("tolerance", g.tolerance, true);
      r.real("confidence", g.confidence, false);
      r.reject_unknown();
      const auto &known = gate_properties();
      if (!g.property.empty() &&
          std::find(known.begin(), known.end(), g.property) == known.end()) {
        errors.push_back(where + ".property: unknown gate '" + g.property + "'");
      }
      if (g.tolerance < 0.0) {
        errors.push_back(where + ".tolerance: must be nonnegative");
      }
      if (!(g.confidence > 0.0)) {
        errors.push_back(where + ".confidence: must be positive");
      }
      spec.gates.push_back(g);
    }
  }

  if (const auto *mc = top.child("modulus_check", false, false)) {
    detail::ObjectReader r(*mc, "modulus_check", errors);
    ModulusCheckSpec m;
    r.integer("pairs", m.pairs, false, 1);
    r.integer("k", m.k, false, 1);
    r.integer("n", m.n, false, 1);
    r.integer("m", m.m, false, 1);
    r.integer("reps", m.reps, false, 1);
    r.integer("max_atoms", m.max_atoms, false, 1);
    r.reject_unknown();
    spec.modulus_check = m;
  }

  if (const auto *pr = top.child("probes", false, false)) {
    detail::ObjectReader r(*pr, "probes", errors);
    ProbeSpec p;
    r.integer("count", p.count, false, 1);
    r.real("box", p.box, false);
    r.reject_unknown();
    if (p.box < 0.0) {
      errors.push_back("probes.box: must be nonnegative");
    }
    spec.probes = p;
  }
  top.reject_unknown();

  // Cross-field checks.
  std::optional<Functional> u;
  if (!spec.functional.empty()) {
    if (!is_zoo_name(spec.functional)) {
      errors.push_back("functional: unknown functional '" + spec.functional + "'");
    } else if (spec.dim >= 1) {
      u = make_zoo_functional(spec.functional, spec.dim);
    }
  }
  for (std::size_t i = 0; i < spec.gates.size(); ++i) {
    const auto &g = spec.gates[i];
    const std::string where = "gates[" + std::to_string(i) + "]";
    if (g.property == "modulus_preservation") {
      if (!spec.modulus_check) {
        errors.push_back(where + ": modulus_preservation needs a modulus_check section");
      }
      if (u && (!u->modulus || !u->modulus->is_global())) {
        errors.push_back(where + ": functional '" + spec.functional +
                         "' has no global modulus of continuity");
      }
    }
    if (g.property == "derivative_first" || g.property == "derivative_second") {
      if (!spec.probes) {
        errors.push_back(where + ": derivative gates need a probes section");
      }
      const bool ok = u && u->has_lions_grad() &&
                      (g.property == "derivative_first" || u->has_second_derivatives());
      if (u && !ok) {
        errors.push_back(where + ": functional '" + spec.functional +
                         "' lacks the required Lions derivatives");
      }
    }
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  return spec;
}

inline ExperimentSpec parse_spec(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  return parse_spec(j);
}

struct ValidationResult {
  std::optional<ExperimentSpec> spec;
  std::vector<std::string> errors;

  bool ok() const { return spec.has_value(); }
};

inline ValidationResult validate_config(const std::string &path) {
  ValidationResult result;
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception &e) {
    result.errors.emplace_back(std::string("io: ") + e.what());
    return result;
  }
  try {
    result.spec = parse_spec(text);
  } catch (const ConfigError &e) {
    result.errors = e.errors();
  }
  return result;
}

inline ExperimentSpec load_spec(const std::string &path) {
  auto result = validate_config(path);
  if (!result.ok()) {
    throw ConfigError(result.errors);
  }
  return *result.spec;
}

/// 64-bit FNV-1a of the canonical serialization. `threads` is excluded: it never changes results.
inline std::string spec_hash(const ExperimentSpec &spec) {
  ExperimentSpec canonical = spec;
  canonical.threads = 1;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_spec(canonical)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

// ---------------------------------------------------------------------------
// Running

struct GateResult {
  GateSpec gate;
  double observed = 0.0;
  bool monotone = true;
  bool passed = false;
  std::string detail;
};

struct RunRecord {
  std::string name;
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRow> convergence;
  std::vector<bool> convergence_step_ok;  // entry e within noise of entry e-1
  std::vector<DerivativeRow> derivatives;
  std::optional<ModulusReport> modulus;
  std::vector<GateResult> gates;
  double wall_clock_seconds = 0.0;

  bool all_passed() const {
    return std::all_of(gates.begin(), gates.end(), [](const auto &g) { return g.passed; });
  }
};

inline std::vector<DerivativeProbe> make_probes(const ExperimentSpec &spec,
                                                const std::vector<DiscreteMeasure> &family,
                                                const RngStream &rng) {
  std::vector<DerivativeProbe> probes;
  if (!spec.probes || family.empty()) {
    return probes;
  }
  PhiloxEngine engine(rng);
  const double box = spec.probes->box;
  auto point = [&]() {
    Vector p(spec.dim);
    for (Eigen::Index a = 0; a < spec.dim; ++a) {
      p(a) = box * (2.0 * engine.uniform() - 1.0);
    }
    return p;
  };
  for (int i = 0; i < spec.probes->count; ++i) {
    const auto &mu = family[static_cast<std::size_t>(i) % family.size()];
    Vector x = point();
    Vector z = point();
    probes.push_back({mu, std::move(x), std::move(z)});
  }
  return probes;
}

namespace detail {

inline bool curve_monotone(const std::vector<double> &errors, const std::vector<double> &ses,
                           double z, std::vector<bool> *steps = nullptr) {
  bool ok = true;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const bool step =
        i == 0 || errors[i] <= errors[i - 1] + z * (ses[i] + ses[i - 1]);
    ok = ok && step;
    if (steps) {
      steps->push_back(step);
    }
  }
  return ok;
}

}  // namespace detail

/*
 * Gate semantics:
 *   uniform_convergence   final sup error <= tolerance, and the curve
 *                         non-increasing within confidence * (se_i + se_{i-1})
 *   modulus_preservation  violation fraction at confidence sigma <= tolerance
 *   derivative_first      as uniform_convergence on the gradient sup error
 *   derivative_second     as uniform_convergence on max(hess_x, hess_mu) errors
 */
inline RunRecord run_experiment(const ExperimentSpec &spec) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.name = spec.name;
  record.spec_hash = spec_hash(spec);
  record.seed = spec.seed;
  const Functional u = make_zoo_functional(spec.functional, spec.dim);
  const DiagonalSchedule schedule(spec.schedule);
  CompactFamilySpec family_spec = spec.compact_family;
  family_spec.dim = spec.dim;
  const auto family = make_compact_family(family_spec);
  const RngStream root{spec.seed, 0};

  auto wants = [&](const std::string &p) {
    return std::any_of(spec.gates.begin(), spec.gates.end(),
                       [&](const GateSpec &g) { return g.property == p; });
  };
  double conv_z = 3.0;
  for (const auto &g : spec.gates) {
    if (g.property == "uniform_convergence") {
      conv_z = g.confidence;
    }
  }

  record.convergence = convergence_curve(u, schedule, family, root.substream(0), spec.threads,
                                          spec.support_factor);
  {
    std::vector<double> errs, ses;
    for (const auto &r : record.convergence) {
      errs.push_back(r.sup_error);
      ses.push_back(r.max_std_error);
    }
    detail::curve_monotone(errs, ses, conv_z, &record.convergence_step_ok);
  }

  if (wants("modulus_preservation") && spec.modulus_check) {
    const auto &mc = *spec.modulus_check;
    SmoothingConfig cfg;
    cfg.k = mc.k;
    cfg.n = mc.n;
    cfg.m = mc.m;
    cfg.mc_reps = mc.reps;
    cfg.threads = spec.threads;
    cfg.support_factor = spec.support_factor;
    double z = 3.0;
    for (const auto &g : spec.gates) {
      if (g.property == "modulus_preservation") {
        z = g.confidence;
      }
    }
    record.modulus = modulus_preservation_check(u, cfg, mc.pairs, root.substream(1), spec.dim,
                                                mc.max_atoms, z);
  }

  if ((wants("derivative_first") || wants("derivative_second")) && spec.probes) {
    const auto probes = make_probes(spec, family, root.substream(3));
    record.derivatives =
        derivative_convergence_experiment(u, schedule, probes, root.substream(2),
                                          spec.threads, spec.support_factor);
  }

  for (const auto &g : spec.gates) {
    GateResult res;
    res.gate = g;
    std::vector<double> errs, ses;
    if (g.property == "uniform_convergence") {
      for (const auto &r : record.convergence) {
        errs.push_back(r.sup_error);
        ses.push_back(r.max_std_error);
      }
    } else if (g.property == "derivative_first") {
      for (const auto &r : record.derivatives) {
        errs.push_back(r.grad_sup_error);
        ses.push_back(r.grad_max_std_error);
      }
    } else if (g.property == "derivative_second") {
      for (const auto &r : record.derivatives) {
        errs.push_back(std::max(r.hess_x_sup_error.value_or(0.0),
                                r.hess_mu_sup_error.value_or(0.0)));
        ses.push_back(r.hess_max_std_error.value_or(0.0));
      }
    }
    if (g.property == "modulus_preservation") {
      if (record.modulus) {
        res.observed = record.modulus->violation_fraction();
        res.passed = res.observed <= g.tolerance;
        res.detail = std::to_string(record.modulus->violations) + " of " +
                     std::to_string(record.modulus->pairs) + " pairs outside the bound";
      } else {
        res.detail = "modulus check did not run";
      }
    } else if (!errs.empty()) {
      res.observed = errs.back();
      res.monotone = detail::curve_monotone(errs, ses, g.confidence);
      res.passed = res.monotone && res.observed <= g.tolerance;
      res.detail = res.monotone ? "curve non-increasing within noise"
                                : "curve increases beyond the noise allowance";
    } else {
      res.detail = "no data";
    }
    record.gates.push_back(res);
  }
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

// ---------------------------------------------------------------------------
// Output

/// Everything except wall-clock time; identical for identical (spec, seed).
inline nlohmann::ordered_json record_metrics_json(const RunRecord &rec) {
  nlohmann::ordered_json j;
  j["name"] = rec.name;
  j["spec_hash"] = rec.spec_hash;
  j["seed"] = rec.seed;
  j["convergence"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rec.convergence.size(); ++i) {
    const auto &r = rec.convergence[i];
    j["convergence"].push_back({{"k", r.entry.k},
                                {"n", r.entry.n},
                                {"m", r.entry.m},
                                {"reps", r.entry.reps},
                                {"sup_error", r.sup_error},
                                {"mean_std_error", r.mean_std_error},
                                {"max_std_error", r.max_std_error},
                                {"within_noise", static_cast<bool>(rec.convergence_step_ok[i])}});
  }
  if (!rec.derivatives.empty()) {
    j["derivatives"] = nlohmann::ordered_json::array();
    for (const auto &r : rec.derivatives) {
      nlohmann::ordered_json row = {{"k", r.entry.k},
                                    {"n", r.entry.n},
                                    {"m", r.entry.m},
                                    {"grad_sup_error", r.grad_sup_error},
                                    {"grad_max_std_error", r.grad_max_std_error}};
      if (r.hess_x_sup_error) {
        row["hess_x_sup_error"] = *r.hess_x_sup_error;
        row["hess_mu_sup_error"] = *r.hess_mu_sup_error;
        row["hess_max_std_error"] = *r.hess_max_std_error;
      }
      j["derivatives"].push_back(row);
    }
  }
  if (rec.modulus) {
    j["modulus"] = {{"pairs", rec.modulus->pairs},
                    {"violations", rec.modulus->violations},
                    {"violation_fraction", rec.modulus->violation_fraction()},
                    {"min_margin", rec.modulus->min_margin}};
  }
  j["gates"] = nlohmann::ordered_json::array();
  for (const auto &g : rec.gates) {
    j["gates"].push_back({{"property", g.gate.property},
                          {"tolerance", g.gate.tolerance},
                          {"confidence", g.gate.confidence},
                          {"observed", g.observed},
                          {"passed", g.passed},
                          {"detail", g.detail}});
  }
  return j;
}

inline nlohmann::ordered_json record_to_json(const RunRecord &rec) {
  auto j = record_metrics_json(rec);
  j["wall_clock_seconds"] = rec.wall_clock_seconds;
  return j;
}

inline std::string record_summary(const RunRecord &rec) {
  std::ostringstream out;
  out << "experiment " << rec.name << " (spec " << rec.spec_hash << ", seed " << rec.seed
      << ")\n";
  for (const auto &r : rec.convergence) {
    out << "  k=" << r.entry.k << " n=" << r.entry.n << " m=" << r.entry.m
        << "  sup_error=" << format_double(r.sup_error)
        << "  se<=" << format_double(r.max_std_error) << '\n';
  }
  if (rec.modulus) {
    out << "  modulus: " << rec.modulus->violations << "/" << rec.modulus->pairs
        << " violations, min margin " << format_double(rec.modulus->min_margin) << '\n';
  }
  for (const auto &g : rec.gates) {
    out << "  [" << (g.passed ? "PASS" : "FAIL") << "] " << g.gate.property
        << " observed=" << format_double(g.observed)
        << " tolerance=" << format_double(g.gate.tolerance) << " (" << g.detail << ")\n";
  }
  out << "  wall clock " << rec.wall_clock_seconds << " s\n";
  return out.str();
}

/// Output directory: WASS_SMOOTH_OUT_DIR if set, else the override, else spec.output_path.
inline std::filesystem::path resolve_output_dir(const ExperimentSpec &spec,
                                                const std::string &override_dir = "") {
  if (const char *env = std::getenv("WASS_SMOOTH_OUT_DIR"); env && *env) {
    return env;
  }
  if (!override_dir.empty()) {
    return override_dir;
  }
  return spec.output_path;
}

/// Writes <name>.convergence.csv, <name>.derivatives.csv, <name>.record.json, <name>.summary.txt.
inline std::vector<std::filesystem::path> write_outputs(const RunRecord &rec,
                                                        const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string &suffix, const std::string &body) {
    const auto path = dir / (rec.name + suffix);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out << body;
    written.push_back(path);
  };
  emit(".convergence.csv", convergence_csv(rec.convergence));
  if (!rec.derivatives.empty()) {
    emit(".derivatives.csv", derivative_csv(rec.derivatives));
  }
  emit(".record.json", record_to_json(rec).dump(2) + "\n");
  emit(".summary.txt", record_summary(rec));
  return written;
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_HARNESS_HPP_
