// Copyright 2026 The isoss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// \file
/// \brief Scenario files: strict JSON parsing, serialization, batch runs and
/// the CSV artifacts they produce.

#ifndef ISOSS_SCENARIO_HPP_
#define ISOSS_SCENARIO_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "isoss/checks.hpp"
#include "isoss/families.hpp"
#include "isoss/factory.hpp"
#include "isoss/stats.hpp"

namespace isoss {

using Json = nlohmann::ordered_json;

/// Schema violation; what() starts with the JSON pointer of the offending
/// value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error((where.empty() ? "/" : where) + ": " + what), where_(where.empty() ? "/" : where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TestDescriptor {
  enum class Type { self_similarity, isotropy, multiplicative_invariance, independence };

  Type type = Type::self_similarity;
  double lambda = 2.0;   // self_similarity, multiplicative_invariance
  double t_star = 1.0;
  double alpha = 1.0;    // self_similarity: exponent under test
  std::vector<Givens> rotation;  // isotropy
  std::size_t num_perm = kDefaultPermutations;  // independence
  std::size_t num_paths = 10000;
};

inline const char* to_string(TestDescriptor::Type t) {
  switch (t) {
    case TestDescriptor::Type::self_similarity: return "self_similarity";
    case TestDescriptor::Type::isotropy: return "isotropy";
    case TestDescriptor::Type::multiplicative_invariance: return "multiplicative_invariance";
    case TestDescriptor::Type::independence: return "independence";
  }
  return "?";
}

struct Scenario {
  std::string name;
  Kind kind = Kind::skew_product;
  FamilySpec spec = GeneratorSpec{};
  Point x0;
  double t_end = 1.0;
  double h = 1e-3;
  std::size_t num_paths = 10000;
  std::uint64_t master_seed = 0;
  std::size_t paths_written = 10;  // leading paths copied to paths.csv / jumps.csv
  std::vector<TestDescriptor> tests;
};

namespace detail {

// Cursor into the document that knows its JSON pointer.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const Json& json() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

  Node at(const std::string& key) const { return {j_.at(key), path_ + "/" + key}; }
  Node at(std::size_t i) const { return {j_.at(i), path_ + "/" + std::to_string(i)}; }
  bool has(const std::string& key) const { return j_.contains(key); }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, _] : j_.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        throw ConfigError(path_ + "/" + key, "unknown key");
    }
  }

  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::uint64_t unsigned_integer() const {
    if (j_.is_number_unsigned()) return j_.get<std::uint64_t>();
    if (j_.is_number_integer() && j_.get<std::int64_t>() >= 0) return j_.get<std::uint64_t>();
    fail("expected a non-negative integer");
  }

 private:
  const Json& j_;
  std::string path_;
};

inline double number_or(const Node& n, const char* key, double fallback) {
  return n.has(key) ? n.at(key).number() : fallback;
}

inline double positive_or(const Node& n, const char* key, double fallback) {
  const double v = number_or(n, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(n.path() + "/" + key, "must be positive and finite");
  return v;
}

inline double nonnegative_or(const Node& n, const char* key, double fallback) {
  const double v = number_or(n, key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(n.path() + "/" + key, "must be non-negative and finite");
  return v;
}

inline std::size_t count_or(const Node& n, const char* key, std::size_t fallback, std::size_t min) {
  if (!n.has(key)) return fallback;
  const auto v = n.at(key).unsigned_integer();
  if (v < min) throw ConfigError(n.path() + "/" + key, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

inline RadialJumpLaw parse_radial_law(const Node& n) {
  if (!n.json().is_object()) n.fail("expected an object");
  if (!n.has("kind")) n.fail("missing key 'kind'");
  const auto kind = n.at("kind").string();
  RadialJumpLaw law;
  if (kind == "point_mass" || kind == "two_point") {
    n.expect_object({"kind", "value"});
    if (!n.has("value")) n.fail("missing key 'value'");
    law = kind == "point_mass" ? RadialJumpLaw::point_mass(n.at("value").number())
                               : RadialJumpLaw::two_point(n.at("value").number());
    if (law.p1 == 0.0) throw ConfigError(n.path() + "/value", "must be nonzero");
  } else if (kind == "normal") {
    n.expect_object({"kind", "mean", "sd"});
    law = RadialJumpLaw::normal(number_or(n, "mean", 0.0), positive_or(n, "sd", 1.0));
  } else if (kind == "uniform") {
    n.expect_object({"kind", "low", "high"});
    if (!n.has("low") || !n.has("high")) n.fail("uniform needs 'low' and 'high'");
    law = RadialJumpLaw::uniform(n.at("low").number(), n.at("high").number());
    if (!(law.p2 > law.p1)) throw ConfigError(n.path() + "/high", "must exceed 'low'");
  } else {
    throw ConfigError(n.path() + "/kind", "unknown radial jump law '" + kind + "'");
  }
  return law;
}

inline AngleLaw parse_angle_law(const Node& n) {
  if (!n.json().is_object()) n.fail("expected an object");
  if (!n.has("kind")) n.fail("missing key 'kind'");
  const auto kind = n.at("kind").string();
  if (kind == "uniform") {
    n.expect_object({"kind"});
    return AngleLaw::uniform();
  }
  if (kind == "point_mass") {
    n.expect_object({"kind", "delta"});
    if (!n.has("delta")) n.fail("missing key 'delta'");
    const double d = n.at("delta").number();
    if (!(d > 0.0 && d <= std::numbers::pi)) throw ConfigError(n.path() + "/delta", "must lie in (0, pi]");
    return AngleLaw::point_mass(d);
  }
  if (kind == "beta") {
    n.expect_object({"kind", "a", "b"});
    return AngleLaw::beta(positive_or(n, "a", 1.0), positive_or(n, "b", 1.0));
  }
  throw ConfigError(n.path() + "/kind", "unknown angle law '" + kind + "'");
}

inline GeneratorSpec parse_generator_spec(const Node& n) {
  n.expect_object({"dim", "alpha", "a11", "c1", "radial_jumps", "angular", "gamma"});
  GeneratorSpec s;
  s.dim = count_or(n, "dim", 2, 2);
  s.alpha = positive_or(n, "alpha", 1.0);
  s.a11 = nonnegative_or(n, "a11", 0.0);
  s.c1 = number_or(n, "c1", 0.0);
  s.gamma = nonnegative_or(n, "gamma", 0.0);
  if (n.has("radial_jumps")) {
    const auto r = n.at("radial_jumps");
    r.expect_object({"rate", "law"});
    s.radial_jump_rate = nonnegative_or(r, "rate", 0.0);
    if (r.has("law")) s.radial_jump_law = parse_radial_law(r.at("law"));
  }
  s.angular.dim = s.dim;
  if (n.has("angular")) {
    const auto a = n.at("angular");
    a.expect_object({"c_sph", "jump_rate", "angle_law"});
    s.angular.c_sph = nonnegative_or(a, "c_sph", 0.0);
    s.angular.jump_rate = nonnegative_or(a, "jump_rate", 0.0);
    if (a.has("angle_law")) s.angular.jump_angle_law = parse_angle_law(a.at("angle_law"));
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  return s;
}

inline StableSpec parse_stable_spec(const Node& n) {
  n.expect_object({"dim", "beta", "eps_trunc"});
  StableSpec s;
  s.dim = count_or(n, "dim", 2, 2);
  s.beta = number_or(n, "beta", 1.0);
  if (!(s.beta > 0.0 && s.beta < 2.0)) throw ConfigError(n.path() + "/beta", "must lie in (0, 2)");
  s.eps_trunc = positive_or(n, "eps_trunc", 0.01);
  return s;
}

inline std::size_t spec_dim(const FamilySpec& spec) {
  return std::visit([](const auto& s) { return s.dim; }, spec);
}

inline bool valid_name(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

inline TestDescriptor parse_test(const Node& n, const Scenario& sc) {
  if (!n.json().is_object()) n.fail("expected an object");
  if (!n.has("type")) n.fail("missing key 'type'");
  const auto type = n.at("type").string();
  TestDescriptor t;
  t.num_paths = sc.num_paths;
  const std::size_t dim = sc.x0.size();
  if (type == "self_similarity") {
    n.expect_object({"type", "lambda", "t_star", "alpha", "num_paths"});
    t.type = TestDescriptor::Type::self_similarity;
    t.lambda = positive_or(n, "lambda", 2.0);
    t.alpha = positive_or(n, "alpha", family_alpha(sc.spec));
  } else if (type == "isotropy") {
    n.expect_object({"type", "t_star", "rotation", "num_paths"});
    t.type = TestDescriptor::Type::isotropy;
    if (!n.has("rotation")) n.fail("missing key 'rotation'");
    const auto rot = n.at("rotation");
    const std::size_t k = rot.array_size();
    if (k == 0) rot.fail("rotation needs at least one Givens factor");
    for (std::size_t i = 0; i < k; ++i) {
      const auto g = rot.at(i);
      g.expect_object({"i", "j", "angle"});
      if (!g.has("i") || !g.has("j") || !g.has("angle")) g.fail("Givens factor needs 'i', 'j', 'angle'");
      const auto gi = g.at("i").unsigned_integer();
      const auto gj = g.at("j").unsigned_integer();
      if (gi >= dim || gj >= dim || gi == gj)
        g.fail("plane indices must be distinct and below the dimension");
      t.rotation.push_back({static_cast<std::size_t>(gi), static_cast<std::size_t>(gj), g.at("angle").number()});
    }
  } else if (type == "multiplicative_invariance") {
    n.expect_object({"type", "lambda", "t_star", "num_paths"});
    t.type = TestDescriptor::Type::multiplicative_invariance;
    t.lambda = positive_or(n, "lambda", 2.0);
  } else if (type == "independence") {
    n.expect_object({"type", "t_star", "num_perm", "num_paths"});
    t.type = TestDescriptor::Type::independence;
    t.num_perm = count_or(n, "num_perm", kDefaultPermutations, 200);
  } else {
    throw ConfigError(n.path() + "/type", "unknown test type '" + type + "'");
  }
  t.t_star = positive_or(n, "t_star", 1.0);
  t.num_paths = count_or(n, "num_paths", sc.num_paths, 1);
  if (t.type == TestDescriptor::Type::independence && t.num_paths < 3)
    throw ConfigError(n.path() + "/num_paths", "independence needs at least 3 paths");
  return t;
}

inline Scenario parse_scenario(const Node& n) {
  n.expect_object({"name", "kind", "spec", "x0", "t_end", "h", "num_paths", "master_seed",
                   "paths_written", "tests"});
  Scenario sc;
  if (!n.has("name")) n.fail("missing key 'name'");
  sc.name = n.at("name").string();
  if (!valid_name(sc.name))
    throw ConfigError(n.path() + "/name", "must be nonempty and use only letters, digits, '_', '-', '.'");
  if (!n.has("kind")) n.fail("missing key 'kind'");
  const auto kind = n.at("kind").string();
  const Json empty = Json::object();
  const Node spec_node = n.has("spec") ? n.at("spec") : Node(empty, n.path() + "/spec");
  if (kind == "skew_product" || kind == "invariant") {
    sc.kind = kind == "invariant" ? Kind::invariant : Kind::skew_product;
    sc.spec = parse_generator_spec(spec_node);
  } else if (kind == "stable") {
    sc.kind = Kind::stable;
    sc.spec = parse_stable_spec(spec_node);
  } else {
    throw ConfigError(n.path() + "/kind", "must be one of skew_product, invariant, stable");
  }
  const std::size_t dim = spec_dim(sc.spec);
  if (n.has("x0")) {
    const auto x = n.at("x0");
    if (x.array_size() != dim) x.fail("expected " + std::to_string(dim) + " coordinates");
    for (std::size_t i = 0; i < dim; ++i) sc.x0.push_back(x.at(i).number());
    if (!(norm(sc.x0) > 0.0) || !std::isfinite(norm(sc.x0))) x.fail("must be a finite nonzero point");
  } else {
    sc.x0 = north_pole(dim);
  }
  if (auto* st = std::get_if<StableSpec>(&sc.spec)) st->x0 = sc.x0;
  sc.t_end = positive_or(n, "t_end", 1.0);
  sc.h = positive_or(n, "h", 1e-3);
  sc.num_paths = count_or(n, "num_paths", 10000, 1);
  sc.master_seed = n.has("master_seed") ? n.at("master_seed").unsigned_integer() : 0;
  sc.paths_written = count_or(n, "paths_written", 10, 0);
  if (n.has("tests")) {
    const auto ts = n.at("tests");
    const std::size_t k = ts.array_size();
    for (std::size_t i = 0; i < k; ++i) sc.tests.push_back(parse_test(ts.at(i), sc));
  }
  return sc;
}

}  // namespace detail

/// Parses a scenario document `{"scenarios": [...]}`. Every key is checked;
/// omitted optional keys take the documented defaults.
inline std::vector<Scenario> parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  const detail::Node root(doc, "");
  root.expect_object({"scenarios"});
  if (!root.has("scenarios")) root.fail("missing key 'scenarios'");
  const auto list = root.at("scenarios");
  const std::size_t k = list.array_size();
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(detail::parse_scenario(list.at(i)));
    for (std::size_t j = 0; j < i; ++j) {
      if (out[j].name == out[i].name) throw ConfigError(list.at(i).path() + "/name", "duplicate scenario name");
    }
  }
  return out;
}

namespace detail {

inline Json to_json(const RadialJumpLaw& law) {
  switch (law.kind) {
    case RadialJumpLaw::Kind::point_mass: return {{"kind", "point_mass"}, {"value", law.p1}};
    case RadialJumpLaw::Kind::two_point: return {{"kind", "two_point"}, {"value", law.p1}};
    case RadialJumpLaw::Kind::normal: return {{"kind", "normal"}, {"mean", law.p1}, {"sd", law.p2}};
    case RadialJumpLaw::Kind::uniform: return {{"kind", "uniform"}, {"low", law.p1}, {"high", law.p2}};
  }
  return {};
}

inline Json to_json(const AngleLaw& law) {
  switch (law.kind) {
    case AngleLaw::Kind::uniform: return {{"kind", "uniform"}};
    case AngleLaw::Kind::point_mass: return {{"kind", "point_mass"}, {"delta", law.delta}};
    case AngleLaw::Kind::beta: return {{"kind", "beta"}, {"a", law.a}, {"b", law.b}};
  }
  return {};
}

inline Json to_json(const FamilySpec& spec) {
  if (const auto* s = std::get_if<StableSpec>(&spec))
    return {{"dim", s->dim}, {"beta", s->beta}, {"eps_trunc", s->eps_trunc}};
  const auto& g = std::get<GeneratorSpec>(spec);
  return {{"dim", g.dim},
          {"alpha", g.alpha},
          {"a11", g.a11},
          {"c1", g.c1},
          {"radial_jumps", {{"rate", g.radial_jump_rate}, {"law", to_json(g.radial_jump_law)}}},
          {"angular",
           {{"c_sph", g.angular.c_sph},
            {"jump_rate", g.angular.jump_rate},
            {"angle_law", to_json(g.angular.jump_angle_law)}}},
          {"gamma", g.gamma}};
}

inline Json to_json(const TestDescriptor& t) {
  Json j{{"type", to_string(t.type)}};
  switch (t.type) {
    case TestDescriptor::Type::self_similarity:
      j["lambda"] = t.lambda;
      j["t_star"] = t.t_star;
      j["alpha"] = t.alpha;
      break;
    case TestDescriptor::Type::isotropy: {
      j["t_star"] = t.t_star;
      Json rot = Json::array();
      for (const auto& g : t.rotation) rot.push_back({{"i", g.i}, {"j", g.j}, {"angle", g.angle}});
      j["rotation"] = rot;
      break;
    }
    case TestDescriptor::Type::multiplicative_invariance:
      j["lambda"] = t.lambda;
      j["t_star"] = t.t_star;
      break;
    case TestDescriptor::Type::independence:
      j["t_star"] = t.t_star;
      j["num_perm"] = t.num_perm;
      break;
  }
  j["num_paths"] = t.num_paths;
  return j;
}

}  // namespace detail

/// Canonical document for the scenarios: every default written out.
inline Json serialize(const std::vector<Scenario>& scenarios) {
  Json list = Json::array();
  for (const auto& sc : scenarios) {
    Json tests = Json::array();
    for (const auto& t : sc.tests) tests.push_back(detail::to_json(t));
    list.push_back({{"name", sc.name},
                    {"kind", to_string(sc.kind)},
                    {"spec", detail::to_json(sc.spec)},
                    {"x0", sc.x0},
                    {"t_end", sc.t_end},
                    {"h", sc.h},
                    {"num_paths", sc.num_paths},
                    {"master_seed", sc.master_seed},
                    {"paths_written", sc.paths_written},
                    {"tests", tests}});
  }
  return {{"scenarios", list}};
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Splits RFC 4180 text into records of fields.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      field.clear();
      row.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::runtime_error("parse_csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// One row of tests.csv. p_value is absent for descriptive rows.
struct TestRow {
  std::string name;
  double statistic = 0.0;
  std::optional<double> p_value;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Json params = Json::object();
  std::uint64_t seed = 0;
};

inline constexpr const char* kTestsHeader = "name,statistic,p_value,n1,n2,params_json,seed";

inline std::string to_csv_line(const TestRow& r) {
  return csv_field(r.name) + "," + format_double(r.statistic) + "," +
         (r.p_value ? format_double(*r.p_value) : std::string()) + "," + std::to_string(r.n1) + "," +
         std::to_string(r.n2) + "," + csv_field(r.params.dump()) + "," + std::to_string(r.seed);
}

inline std::vector<TestRow> read_tests_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<std::vector<std::string>> rows;
  try {
    rows = parse_csv(ss.str());
  } catch (const std::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  if (rows.empty()) throw IoError(file.string() + ": empty file");
  std::vector<TestRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 7) throw IoError(file.string() + ": row " + std::to_string(i) + " has wrong arity");
    try {
      TestRow r;
      r.name = f[0];
      r.statistic = std::stod(f[1]);
      if (!f[2].empty()) r.p_value = std::stod(f[2]);
      r.n1 = std::stoull(f[3]);
      r.n2 = std::stoull(f[4]);
      r.params = Json::parse(f[5]);
      r.seed = std::stoull(f[6]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw IoError(file.string() + ": row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

inline constexpr double kReportLevel = 0.01;

/// Threshold a row's p-value must exceed: the 1% level split over its
/// Bonferroni group.
inline double report_threshold(const TestRow& r) {
  double k = 1.0;
  if (r.params.contains("bonferroni") && r.params["bonferroni"].is_number())
    k = std::max(1.0, r.params["bonferroni"].get<double>());
  return kReportLevel / k;
}

inline std::string render_report(const std::string& scenario, const std::vector<TestRow>& rows) {
  std::ostringstream os;
  os << "scenario " << scenario << "\n";
  std::size_t passed = 0, failed = 0;
  for (const auto& r : rows) {
    std::string detail;
    for (const auto& [key, value] : r.params.items()) {
      if (key == "seed" || key == "rotation" || key == "bonferroni") continue;
      detail += " " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    }
    os << "  " << r.name << detail;
    if (r.name == "jump_fraction") {
      os << "  fraction=" << format_double(r.statistic) << "\n";
      continue;
    }
    if (!r.p_value) {
      os << "  statistic=" << format_double(r.statistic) << "\n";
      continue;
    }
    const double thr = report_threshold(r);
    const bool ok = *r.p_value > thr;
    (ok ? passed : failed) += 1;
    os << "  p=" << format_double(*r.p_value) << " threshold=" << format_double(thr) << "  "
       << (ok ? "PASS" : "FAIL") << "\n";
  }
  os << "  summary: " << passed << " passed, " << failed << " failed\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Running

inline constexpr std::uint64_t kTestSeedSalt = 0x7e57'5eed'0000'0000ULL;

/// Seed of the i-th test of a scenario; disjoint from the path seeds.
inline std::uint64_t test_seed(std::uint64_t master, std::size_t index) {
  return path_seed(master ^ kTestSeedSalt, index);
}

struct RunOptions {
  bool run_tests = true;  // false: simulate and report the jump fraction only
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

inline void close_output(std::ofstream& out, const std::filesystem::path& file) {
  out.close();
  if (!out) throw IoError("error writing " + file.string());
}

inline std::vector<TestRow> run_test(const Scenario& sc, const TestDescriptor& t, std::uint64_t seed) {
  std::vector<TestReport> reps;
  switch (t.type) {
    case TestDescriptor::Type::self_similarity:
      reps = self_similarity_check(original_time_sampler(sc.kind, sc.spec, sc.h), sc.x0, t.alpha, t.lambda,
                                   t.t_star, t.num_paths, seed);
      break;
    case TestDescriptor::Type::isotropy:
      reps = isotropy_check(original_time_sampler(sc.kind, sc.spec, sc.h), sc.x0, Rotation(t.rotation),
                            t.t_star, t.num_paths, seed);
      break;
    case TestDescriptor::Type::multiplicative_invariance:
      reps = multiplicative_invariance_check(lamperti_time_sampler(sc.kind, sc.spec, sc.h), sc.x0, t.lambda,
                                             t.t_star, t.num_paths, seed);
      break;
    case TestDescriptor::Type::independence: {
      const auto sampler = lamperti_time_sampler(sc.kind, sc.spec, sc.h);
      std::vector<std::optional<std::pair<double, double>>> got(t.num_paths);
      parallel_for(t.num_paths, [&](std::size_t i) {
        got[i] = radial_angular_functionals(sampler(sc.x0, t.t_star, path_seed(seed, i)), t.t_star);
      });
      std::vector<std::pair<double, double>> pairs;
      for (const auto& g : got) {
        if (g) pairs.push_back(*g);
      }
      if (pairs.size() < 3) throw std::runtime_error("independence: fewer than 3 surviving paths");
      Rng rng(splitmix64(seed ^ kTestSeedSalt));
      auto rep = independence_check(pairs, t.num_perm, rng);
      rep.params = Json{{"t_star", t.t_star}, {"num_perm", t.num_perm},
                        {"functionals", "log_radius,angular_displacement"}, {"seed", seed}};
      reps.push_back(std::move(rep));
      break;
    }
  }
  std::vector<TestRow> rows;
  for (auto& r : reps) rows.push_back({r.name, r.statistic, r.p_value, r.n1, r.n2, r.params, seed});
  return rows;
}

}  // namespace detail

struct ScenarioResult {
  JumpFraction jumps;
  std::vector<TestRow> rows;
};

/// Simulates num_paths paths, then runs the listed tests, writing
/// paths.csv, jumps.csv, tests.csv and report.txt into out_dir. Output
/// depends only on the scenario (including master_seed), not on the thread
/// count.
inline ScenarioResult run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                                   RunOptions opts = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const auto sampler = original_time_sampler(sc.kind, sc.spec, sc.h);
  const std::size_t kept = std::min(sc.paths_written, sc.num_paths);
  std::vector<JumpFraction> fractions(sc.num_paths);
  std::vector<CadlagPath> written(kept);
  parallel_for(sc.num_paths, [&](std::size_t i) {
    auto p = sampler(sc.x0, sc.t_end, path_seed(sc.master_seed, i));
    fractions[i] = simultaneous_jump_fraction(p);
    if (i < kept) written[i] = std::move(p);
  });

  ScenarioResult result;
  for (const auto& f : fractions) result.jumps += f;

  const std::size_t d = sc.x0.size();
  {
    const auto file = out_dir / "paths.csv";
    auto out = detail::open_output(file);
    out << "path_id,t";
    for (std::size_t k = 1; k <= d; ++k) out << ",x_" << k;
    out << ",r,is_jump\n";
    for (std::size_t i = 0; i < kept; ++i) {
      const auto& p = written[i];
      std::size_t next_jump = 0;
      for (std::size_t s = 0; s < p.size(); ++s) {
        const double t = p.times()[s];
        bool is_jump = false;
        if (next_jump < p.jumps().size() && p.jumps()[next_jump].time == t) {
          is_jump = true;
          ++next_jump;
        }
        out << i << "," << format_double(t);
        for (double c : p.states()[s]) out << "," << format_double(c);
        out << "," << format_double(norm(p.states()[s])) << "," << (is_jump ? 1 : 0) << "\n";
      }
    }
    detail::close_output(out, file);
  }
  {
    const auto file = out_dir / "jumps.csv";
    auto out = detail::open_output(file);
    out << "path_id,t";
    for (std::size_t k = 1; k <= d; ++k) out << ",left_" << k;
    for (std::size_t k = 1; k <= d; ++k) out << ",right_" << k;
    out << ",class\n";
    for (std::size_t i = 0; i < kept; ++i) {
      for (const auto& j : written[i].jumps()) {
        out << i << "," << format_double(j.time);
        for (double c : j.left) out << "," << format_double(c);
        for (double c : j.right) out << "," << format_double(c);
        out << "," << to_string(classify_jump(j)) << "\n";
      }
    }
    detail::close_output(out, file);
  }
  written.clear();

  result.rows.push_back({"jump_fraction",
                         result.jumps.fraction(),
                         std::nullopt,
                         result.jumps.total,
                         sc.num_paths,
                         Json{{"joint", result.jumps.joint},
                              {"total", result.jumps.total},
                              {"t_end", sc.t_end},
                              {"tol_r", kDefaultJumpTol},
                              {"tol_theta", kDefaultJumpTol}},
                         sc.master_seed});
  if (opts.run_tests) {
    for (std::size_t i = 0; i < sc.tests.size(); ++i) {
      auto rows = detail::run_test(sc, sc.tests[i], test_seed(sc.master_seed, i));
      for (auto& r : rows) {
        r.params["test_index"] = i;
        result.rows.push_back(std::move(r));
      }
    }
  }
  {
    const auto file = out_dir / "tests.csv";
    auto out = detail::open_output(file);
    out << kTestsHeader << "\n";
    for (const auto& r : result.rows) out << to_csv_line(r) << "\n";
    detail::close_output(out, file);
  }
  {
    const auto file = out_dir / "report.txt";
    auto out = detail::open_output(file);
    out << render_report(sc.name, result.rows);
    detail::close_output(out, file);
  }
  return result;
}

}  // namespace isoss

#endif  // ISOSS_SCENARIO_HPP_
