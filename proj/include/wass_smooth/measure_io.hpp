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

#ifndef WASS_SMOOTH_MEASURE_IO_HPP_
#define WASS_SMOOTH_MEASURE_IO_HPP_

#include <wass_smooth/measure.hpp>

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wass_smooth {

// Shortest representation that parses back to the same double.
inline std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw InvalidInput("not a number: '" + std::string(text) + "'");
  }
  return value;
}

/// CSV with header `w,x1,...,xd` and one atom per row.
inline std::string to_csv(const DiscreteMeasure &mu) {
  std::string out = "w";
  for (Eigen::Index j = 0; j < mu.dim(); ++j) {
    out += ",x" + std::to_string(j + 1);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    out += format_double(mu.weight(i));
    for (Eigen::Index j = 0; j < mu.dim(); ++j) {
      out += ',';
      out += format_double(mu.points()(j, i));
    }
    out += '\n';
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return fields;
}

inline DiscreteMeasure from_csv(const std::string &text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) {
    throw InvalidInput("csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "w") {
    throw InvalidInput("csv: header must be w,x1,...,xd");
  }
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (header[static_cast<std::size_t>(j + 1)] != "x" + std::to_string(j + 1)) {
      throw InvalidInput("csv: header must be w,x1,...,xd");
    }
  }
  std::vector<double> weights;
  std::vector<double> coords;
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw InvalidInput("csv: wrong field count on line " + std::to_string(line_no));
    }
    weights.push_back(parse_double(fields[0]));
    for (std::size_t j = 1; j < fields.size(); ++j) {
      coords.push_back(parse_double(fields[j]));
    }
  }
  if (weights.empty()) {
    throw InvalidInput("csv: no atoms");
  }
  const auto n = static_cast<Eigen::Index>(weights.size());
  Matrix points = Eigen::Map<const Matrix>(coords.data(), dim, n);
  Vector w = Eigen::Map<const Vector>(weights.data(), n);
  return {std::move(points), std::move(w)};
}

inline nlohmann::json to_json(const DiscreteMeasure &mu) {
  nlohmann::json points = nlohmann::json::array();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    points.push_back(std::vector<double>(mu.point(i).begin(), mu.point(i).end()));
  }
  return {{"dim", mu.dim()},
          {"weights", std::vector<double>(mu.weights().begin(), mu.weights().end())},
          {"points", std::move(points)}};
}

inline DiscreteMeasure measure_from_json(const nlohmann::json &j) {
  try {
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto &points = j.at("points");
    if (dim < 1 || points.size() != weights.size()) {
      throw InvalidInput("json measure: inconsistent sizes");
    }
    Matrix pts(dim, static_cast<Eigen::Index>(weights.size()));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const auto row = points[i].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != dim) {
        throw InvalidInput("json measure: point has wrong dimension");
      }
      pts.col(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const Vector>(row.data(), dim);
    }
    Vector w = Eigen::Map<const Vector>(weights.data(), pts.cols());
    return {std::move(pts), std::move(w)};
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput(std::string("json measure: ") + e.what());
  }
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline DiscreteMeasure load_csv(const std::string &path) {
  return from_csv(read_file(path));
}

inline void save_csv(const DiscreteMeasure &mu, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot write " + path);
  }
  out << to_csv(mu);
}

inline Vector parse_vector(std::string_view text) {
  std::vector<double> values;
  for (auto part : split(text, ',')) {
    values.push_back(parse_double(part));
  }
  if (values.empty()) {
    throw InvalidInput("empty vector");
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/*
 * Text form of a measure source:
 *   gaussian:mean=0,0;sd=1
 *   uniform:lo=-1,-1;hi=1,1
 *   dirac:at=0.5,0
 * Anything else is read as the path of a particle-cloud CSV.
 */
inline MeasureSource parse_measure_source(const std::string &text) {
  const auto colon = text.find(':');
  const std::string kind = colon == std::string::npos ? "" : text.substr(0, colon);
  if (kind != "gaussian" && kind != "uniform" && kind != "dirac") {
    return load_csv(text);
  }
  std::map<std::string, std::string> fields;
  for (auto item : split(std::string_view(text).substr(colon + 1), ';')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput("measure spec: expected key=value in '" + std::string(item) + "'");
    }
    fields[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
  }
  auto take = [&](const std::string &key) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw InvalidInput("measure spec '" + kind + "': missing " + key);
    }
    std::string value = it->second;
    fields.erase(it);
    return value;
  };
  MeasureSource out = DiscreteMeasure::uniform(Matrix::Zero(1, 1));
  if (kind == "gaussian") {
    const Vector mean = parse_vector(take("mean"));
    out = MeasureGenerator::isotropic_gaussian(mean, parse_double(take("sd")));
  } else if (kind == "uniform") {
    const Vector lo = parse_vector(take("lo"));
    out = MeasureGenerator::uniform_box(lo, parse_vector(take("hi")));
  } else {
    out = dirac(parse_vector(take("at")));
  }
  if (!fields.empty()) {
    throw InvalidInput("measure spec '" + kind + "': unknown key " + fields.begin()->first);
  }
  return out;
}

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_MEASURE_IO_HPP_
