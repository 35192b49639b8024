#include "piola/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace piola {

using nlohmann::json;

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> all = {
      "euclidean-piola", "riemannian-piola", "marsden-hughes", "generalized",     "coordinate",          "mh83-negative",
      "cof-derivative",  "hodge-parallel",   "null-lagrangian", "weak-form",       "boundary-dependence",
  };
  return all;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ScenarioError("scenario " + path + ": " + message);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

Expr expression(const json& j, int dim, const std::string& path) {
  if (j.is_number()) return Expr::constant(j.get<double>());
  if (!j.is_string()) fail(path, "expected an expression string");
  try {
    return parse(j.get<std::string>(), dim);
  } catch (const ParseError& e) {
    fail(path, std::string("expression error: ") + e.what());
  }
}

std::vector<Expr> expression_list(const json& j, int dim, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail(path, "expected an array of " + std::to_string(dim) + " expressions");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expression(j[i], dim, path + "[" + std::to_string(i) + "]"));
  return out;
}

std::shared_ptr<const Chart> chart(const json& j, const std::string& path) {
  const int dim = integer(require(j, "dim", path), path + ".dim");
  if (dim < 1 || dim > 8) fail(path + ".dim", "dimension must be between 1 and 8");
  const json& box = require(j, "box", path);
  if (!box.is_array() || static_cast<int>(box.size()) != dim) fail(path + ".box", "expected dim [lo, hi] pairs");
  std::vector<std::pair<double, double>> bounds;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const std::string bp = path + ".box[" + std::to_string(i) + "]";
    if (!box[i].is_array() || box[i].size() != 2) fail(bp, "expected [lo, hi]");
    const double lo = number(box[i][0], bp);
    const double hi = number(box[i][1], bp);
    if (!(lo < hi)) fail(bp, "lo must be less than hi");
    bounds.emplace_back(lo, hi);
  }
  const json& metric = require(j, "metric", path);
  if (!metric.is_array() || static_cast<int>(metric.size()) != dim) fail(path + ".metric", "expected a dim x dim matrix");
  std::vector<std::vector<Expr>> g;
  for (std::size_t i = 0; i < metric.size(); ++i) {
    const std::string rp = path + ".metric[" + std::to_string(i) + "]";
    g.push_back(expression_list(metric[i], dim, rp));
  }
  auto c = std::make_shared<const Chart>(Box(std::move(bounds)), std::move(g));
  try {
    c->validate();
  } catch (const GeometryError& e) {
    fail(path + ".metric", e.what());
  }
  return c;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario: invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const std::string r = "$";
  const json& schema = require(root, "schema", r);
  if (!schema.is_number_integer() || schema.get<int>() != 1) fail("$.schema", "unsupported schema version (expected 1)");

  Scenario s;
  const json& name = require(root, "name", r);
  if (!name.is_string() || name.get<std::string>().empty()) fail("$.name", "expected a non-empty string");
  s.name = name.get<std::string>();
  s.source = chart(require(root, "source", r), "$.source");
  s.target = chart(require(root, "target", r), "$.target");
  const int d = s.source->dim();
  if (s.target->dim() != d) fail("$.target.dim", "source and target dimensions differ");

  auto components = expression_list(require(root, "map", r), d, "$.map");
  try {
    auto map = std::make_shared<const ChartMap>(s.source, s.target, std::move(components));
    map->validate_image();
    s.map = std::move(map);
  } catch (const GeometryError& e) {
    fail("$.map", e.what());
  } catch (const EvalError& e) {
    fail("$.map", std::string("evaluation error: ") + e.what());
  }

  if (auto it = root.find("fields"); it != root.end()) {
    if (!it->is_object()) fail("$.fields", "expected an object");
    for (const auto& [key, value] : it->items()) {
      const std::string fp = "$.fields." + key;
      auto list = expression_list(value, d, fp);
      if (key == "X") {
        s.x = std::move(list);
      } else if (key == "xi") {
        s.xi = std::move(list);
      } else if (key == "V") {
        s.v = std::move(list);
      } else if (key == "W") {
        s.w = std::move(list);
      } else {
        fail(fp, "unknown field (expected X, xi, V or W)");
      }
    }
  }

  const json& checks = require(root, "checks", r);
  if (!checks.is_array()) fail("$.checks", "expected an array of check names");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string cp = "$.checks[" + std::to_string(i) + "]";
    if (!checks[i].is_string()) fail(cp, "expected a check name");
    const std::string c = checks[i].get<std::string>();
    if (c == "all") {
      s.checks = known_checks();
      continue;
    }
    const auto& known = known_checks();
    if (std::find(known.begin(), known.end(), c) == known.end()) fail(cp, "unknown check '" + c + "'");
    if (std::find(s.checks.begin(), s.checks.end(), c) == s.checks.end()) s.checks.push_back(c);
  }

  if (auto it = root.find("tolerances"); it != root.end()) {
    if (!it->is_object()) fail("$.tolerances", "expected an object");
    for (const auto& [key, value] : it->items()) {
      const std::string tp = "$.tolerances." + key;
      const double v = number(value, tp);
      if (!(v > 0.0)) fail(tp, "tolerance must be positive");
      if (key == "pointwise") {
        s.tolerances.pointwise = v;
      } else if (key == "integral") {
        s.tolerances.integral = v;
      } else if (key == "fd") {
        s.tolerances.fd = v;
      } else if (key == "two_path") {
        s.tolerances.two_path = v;
      } else if (key == "adjointness") {
        s.tolerances.adjointness = v;
      } else if (key == "boundary") {
        s.tolerances.boundary = v;
      } else {
        fail(tp, "unknown tolerance");
      }
    }
  }
  if (auto it = root.find("sampling"); it != root.end()) {
    if (auto c = it->find("count"); c != it->end()) s.sample_count = integer(*c, "$.sampling.count");
    if (auto c = it->find("seed"); c != it->end()) {
      if (!c->is_number_unsigned()) fail("$.sampling.seed", "expected a non-negative integer");
      s.seed = c->get<std::uint64_t>();
    }
    if (s.sample_count < 1) fail("$.sampling.count", "must be positive");
  }
  if (auto it = root.find("quadrature_order"); it != root.end()) {
    s.quadrature_order = integer(*it, "$.quadrature_order");
    if (s.quadrature_order < 1 || s.quadrature_order > 64) fail("$.quadrature_order", "must be between 1 and 64");
  }
  if (auto it = root.find("fd_step"); it != root.end()) {
    s.fd_step = number(*it, "$.fd_step");
    if (!(s.fd_step > 0.0)) fail("$.fd_step", "must be positive");
  }
  if (auto it = root.find("probe"); it != root.end()) {
    if (!it->is_array() || static_cast<int>(it->size()) != d) fail("$.probe", "expected a point of the source chart");
    VecD p(d);
    for (int i = 0; i < d; ++i) p(i) = number((*it)[static_cast<std::size_t>(i)], "$.probe");
    if (!s.source->box().contains(as_span(p))) fail("$.probe", "probe point outside the source box");
    s.probe = p;
  }
  if (auto it = root.find("mh83_floor"); it != root.end()) s.mh83_floor = number(*it, "$.mh83_floor");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario load_builtin(std::string_view name) {
  for (const auto& b : builtin_scenarios())
    if (b.name == name) return parse_scenario(b.json);
  throw ScenarioError("unknown built-in scenario '" + std::string(name) + "'");
}

}  // namespace piola
