#pragma once

// Experiment configuration: one JSON document per experiment, schema_version 1, unknown keys rejected.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pss/convex_set.hpp"
#include "pss/errors.hpp"
#include "pss/gallery.hpp"
#include "pss/point.hpp"

namespace pss::config {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Parse or validation failure; `field` is the dotted path of the offending entry.
class ParseError : public ConfigError {
 public:
  ParseError(std::string field, const std::string& message)
      : ConfigError(field.empty() ? message : "field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Read cursor over a JSON object that remembers which keys were consumed.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    if (!j_.contains(key)) throw ParseError(at(key), "required field missing");
    used_.insert(key);
    return j_.at(key);
  }

  Node object(const std::string& key) { return Node(raw(key), at(key)); }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) throw ParseError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError(at(key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ParseError(at(key), "expected a nonnegative integer");
    return v.get<std::size_t>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : fallback; }

  std::string text(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) throw ParseError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ParseError(at(key), "expected true or false");
    return v.get<bool>();
  }

  Point vector(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array() || v.empty()) throw ParseError(at(key), "expected a nonempty array of numbers");
    Point p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ParseError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      p[static_cast<Eigen::Index>(i)] = v[i].get<double>();
      if (!std::isfinite(p[static_cast<Eigen::Index>(i)])) {
        throw ParseError(at(key) + "[" + std::to_string(i) + "]", "must be finite");
      }
    }
    return p;
  }

  Matrix matrix(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
      throw ParseError(at(key), "expected a nonempty array of rows");
    }
    const std::size_t cols = v[0].size();
    Matrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string row_path = at(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != cols) throw ParseError(row_path, "rows must have equal length");
      for (std::size_t j = 0; j < cols; ++j) {
        if (!v[i][j].is_number() || !std::isfinite(v[i][j].get<double>())) {
          throw ParseError(row_path + "[" + std::to_string(j) + "]", "expected a finite number");
        }
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
      }
    }
    return m;
  }

  /// Rejects any key that was not consumed.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ParseError(at(it.key()), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

struct RuleConfig {
  std::string type = "constant";
  double alpha = 0.0;
  double alpha_factor = 1.0;
  std::size_t pilot_rounds = 20;
  ExogenousStep exogenous;
  std::vector<double> gammas{1.0};
  double gamma_floor = 1.0;
  std::optional<double> target_limit;
  double target_offset = 0.0;
  double target_excess = 0.0;
  double target_excess_power = 1.0;
};

struct RandomStart {
  double lower = -1.0;
  double upper = 1.0;
};

using StartSpec = std::variant<std::monostate, Point, RandomStart>;

struct RunConfig {
  StartSpec x0;
  std::size_t max_iters = 1000;
  double stop_tol = 0.0;
  std::size_t record_every = 1;
  std::uint64_t seed = 1;
};

struct Corruption {
  std::string kind;  // scale_alpha | shift_values | perturb_point | understate_rho
  double amount = 0.0;
  std::size_t k = 0;
};

struct CertificateConfig {
  std::vector<std::string> checks;  // empty: choose by rule and truth
  std::size_t probes = 50;
  std::optional<Corruption> corrupt;
  double growth_factor = 10.0;
  double tail_fraction = 0.5;
  double target_tolerance = 1e-6;
  std::optional<double> gap_threshold;
};

struct OutputConfig {
  std::string dir = "run";
  bool points = false;
};

struct ExperimentConfig {
  Json document;
  std::string problem;
  Json problem_params = Json::object();
  RuleConfig rule;
  RunConfig run;
  CertificateConfig certificates;
  OutputConfig output;
};

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "key_inequality",       "best_value_bound",       "ergodic_bound",        "ergodic_jensen",
      "best_monotone",        "constant_rate",          "exogenous_quasifejer", "exogenous_step_bound",
      "exogenous_value_bound", "polyak_fejer",          "polyak_complexity",    "scaled_gap_tail",
      "inconsistent_target",  "summary_corollary",      "unbounded_iterates",   "final_gap"};
  return names;
}

inline RuleConfig parse_rule(Node n) {
  RuleConfig r;
  r.type = n.text("type");
  if (r.type == "constant") {
    r.alpha = n.number("alpha");
    if (!(r.alpha > 0.0)) throw ParseError(n.at("alpha"), "must be positive");
  } else if (r.type == "constant_optimal") {
    r.alpha_factor = n.number("alpha_factor", 1.0);
    if (!(r.alpha_factor > 0.0)) throw ParseError(n.at("alpha_factor"), "must be positive");
    r.pilot_rounds = n.count("pilot_rounds", r.pilot_rounds);
    if (r.pilot_rounds == 0) throw ParseError(n.at("pilot_rounds"), "must be positive");
  } else if (r.type == "exogenous") {
    r.exogenous.scale = n.number("scale", 1.0);
    r.exogenous.power = n.number("power", 0.51);
    if (!(r.exogenous.scale > 0.0)) throw ParseError(n.at("scale"), "must be positive");
    if (!(r.exogenous.power > 0.5 && r.exogenous.power <= 1.0)) throw ParseError(n.at("power"), "must lie in (0.5, 1]");
  } else if (r.type == "polyak") {
    if (n.has("gamma")) {
      r.gammas = {n.number("gamma")};
    } else if (n.has("gammas")) {
      const Point g = n.vector("gammas");
      r.gammas.assign(g.data(), g.data() + g.size());
    }
    const std::string gamma_field = n.has("gamma") ? "gamma" : "gammas";
    if (r.gammas.empty()) throw ParseError(n.at(gamma_field), "must not be empty");
    for (double g : r.gammas) {
      if (!(g > 0.0 && g < 2.0)) throw ParseError(n.at(gamma_field), "must lie in (0, 2)");
    }
    const double smallest = *std::min_element(r.gammas.begin(), r.gammas.end());
    const double largest = *std::max_element(r.gammas.begin(), r.gammas.end());
    r.gamma_floor = n.number("gamma_floor", std::min(smallest, 2.0 - largest));
    if (!(r.gamma_floor > 0.0 && r.gamma_floor <= 1.0)) throw ParseError(n.at("gamma_floor"), "must lie in (0, 1]");
    if (!(smallest >= r.gamma_floor && largest <= 2.0 - r.gamma_floor)) {
      throw ParseError(n.at(gamma_field), "must lie in [gamma_floor, 2 - gamma_floor]");
    }
    if (n.has("target_limit")) r.target_limit = n.number("target_limit");
    r.target_offset = n.number("target_offset", 0.0);
    r.target_excess = n.number("target_excess", 0.0);
    if (!(r.target_excess >= 0.0)) throw ParseError(n.at("target_excess"), "must be nonnegative");
    r.target_excess_power = n.number("target_excess_power", 1.0);
    if (!(r.target_excess_power > 0.0)) throw ParseError(n.at("target_excess_power"), "must be positive");
  } else {
    throw ParseError(n.at("type"), "unknown rule '" + r.type + "'");
  }
  n.finish();
  return r;
}

inline RunConfig parse_run(Node n) {
  RunConfig r;
  if (n.has("x0")) {
    const Json& v = n.raw("x0");
    if (v.is_string()) {
      if (v.get<std::string>() != "default") throw ParseError(n.at("x0"), "expected \"default\", an array or {random}");
    } else if (v.is_array()) {
      r.x0 = n.vector("x0");
    } else {
      Node rnd(v, n.at("x0"));
      Node box = rnd.object("random");
      RandomStart s{box.number("lower"), box.number("upper")};
      if (!(s.lower < s.upper)) throw ParseError(box.at("upper"), "must exceed lower");
      box.finish();
      rnd.finish();
      r.x0 = s;
    }
  }
  r.max_iters = n.count("max_iters", r.max_iters);
  if (r.max_iters == 0) throw ParseError(n.at("max_iters"), "must be positive");
  r.stop_tol = n.number("stop_tol", 0.0);
  if (!(r.stop_tol >= 0.0)) throw ParseError(n.at("stop_tol"), "must be nonnegative");
  r.record_every = n.count("record_every", 1);
  if (r.record_every == 0) throw ParseError(n.at("record_every"), "must be positive");
  r.seed = n.count("seed", 1);
  n.finish();
  return r;
}

inline CertificateConfig parse_certificates(Node n) {
  CertificateConfig c;
  if (n.has("checks")) {
    const Json& v = n.raw("checks");
    if (v.is_string() && v.get<std::string>() == "auto") {
      c.checks.clear();
    } else if (v.is_array()) {
      const auto& known = check_names();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = n.at("checks") + "[" + std::to_string(i) + "]";
        if (!v[i].is_string()) throw ParseError(p, "expected a check name");
        const auto name = v[i].get<std::string>();
        if (std::find(known.begin(), known.end(), name) == known.end()) throw ParseError(p, "unknown check '" + name + "'");
        c.checks.push_back(name);
      }
    } else {
      throw ParseError(n.at("checks"), "expected \"auto\" or an array of check names");
    }
  }
  c.probes = n.count("probes", c.probes);
  c.growth_factor = n.number("growth_factor", c.growth_factor);
  c.tail_fraction = n.number("tail_fraction", c.tail_fraction);
  if (!(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0)) throw ParseError(n.at("tail_fraction"), "must lie in (0, 1]");
  c.target_tolerance = n.number("target_tolerance", c.target_tolerance);
  if (n.has("gap_threshold")) c.gap_threshold = n.number("gap_threshold");
  if (n.has("corrupt")) {
    Node k = n.object("corrupt");
    Corruption x;
    x.kind = k.text("kind");
    if (x.kind == "scale_alpha") {
      x.amount = k.number("factor");
    } else if (x.kind == "shift_values") {
      x.amount = k.number("delta");
    } else if (x.kind == "perturb_point") {
      x.amount = k.number("delta");
      x.k = k.count("k", 0);
    } else if (x.kind == "understate_rho") {
      x.amount = k.number("rho", 0.0);
      if (!(x.amount >= 0.0)) throw ParseError(k.at("rho"), "must be nonnegative");
    } else {
      throw ParseError(k.at("kind"), "unknown corruption '" + x.kind + "'");
    }
    k.finish();
    c.corrupt = x;
  }
  n.finish();
  return c;
}

inline OutputConfig parse_output(Node n) {
  OutputConfig o;
  o.dir = n.text("dir", o.dir);
  if (o.dir.empty()) throw ParseError(n.at("dir"), "must be nonempty");
  o.points = n.flag("points", false);
  n.finish();
  return o;
}

inline ExperimentConfig from_json(const Json& doc) {
  ExperimentConfig c;
  c.document = doc;
  Node root(doc, "");
  if (!root.has("schema_version")) throw ParseError("schema_version", "required field missing");
  const Json& version = root.raw("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw ParseError("schema_version", "unsupported (expected " + std::to_string(kSchemaVersion) + ")");
  }
  {
    Node p = root.object("problem");
    c.problem = p.text("name");
    const auto& names = gallery::problem_names();
    if (std::find(names.begin(), names.end(), c.problem) == names.end()) {
      throw ParseError(p.at("name"), "unknown problem '" + c.problem + "'");
    }
    if (p.has("params")) {
      c.problem_params = p.raw("params");
      if (!c.problem_params.is_object()) throw ParseError(p.at("params"), "expected an object");
    }
    p.finish();
  }
  c.rule = parse_rule(root.object("rule"));
  if (root.has("run")) c.run = parse_run(root.object("run"));
  if (root.has("certificates")) c.certificates = parse_certificates(root.object("certificates"));
  if (root.has("output")) c.output = parse_output(root.object("output"));
  if (root.has("description")) (void)root.text("description");
  root.finish();
  return c;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ParseError("", path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline ExperimentConfig load(const std::string& path) { return from_json(read_json_file(path)); }

// ---- problem construction ----

inline ConvexSet parse_set(Node n) {
  const std::string type = n.text("type");
  try {
    ConvexSet out = [&]() {
      if (type == "box") return ConvexSet::box(n.vector("lower"), n.vector("upper"));
      if (type == "ball") return ConvexSet::ball(n.vector("center"), n.number("radius"));
      if (type == "halfspace") return ConvexSet::halfspace(n.vector("normal"), n.number("offset"));
      if (type == "affine") return ConvexSet::affine(n.matrix("A"), n.vector("b"));
      if (type == "simplex") {
        return ConvexSet::simplex(static_cast<Eigen::Index>(n.count("dim")), n.number("radius", 1.0));
      }
      if (type == "nonneg_orthant") return ConvexSet::nonneg_orthant(static_cast<Eigen::Index>(n.count("dim")));
      throw ParseError(n.at("type"), "unknown set type '" + type + "'");
    }();
    n.finish();
    return out;
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ParseError(n.path(), e.what());
  }
}

inline double parse_lambda(Node& n) {
  const double lambda = n.number("lambda", 0.0);
  if (!(lambda >= 0.0)) throw ParseError(n.at("lambda"), "must be nonnegative");
  return lambda;
}

/// Builds the gallery instance named by the problem block.
inline ProblemInstance build_problem(const std::string& name, const Json& params) {
  Node n(params, "problem.params");
  try {
    if (name == "lad_l1") {
      const double lambda = parse_lambda(n);
      if (n.has("A")) {
        Matrix a = n.matrix("A");
        Point b = n.vector("b");
        if (b.size() != a.rows()) throw ParseError(n.at("b"), "length must equal the number of rows of A");
        n.finish();
        return gallery::make_lad_l1(a, b, lambda);
      }
      const auto rows = static_cast<Eigen::Index>(n.count("rows", 20));
      const auto cols = static_cast<Eigen::Index>(n.count("cols", 10));
      const std::uint64_t seed = n.count("seed", 1);
      n.finish();
      return gallery::make_lad_l1_random(rows, cols, lambda, seed);
    }
    if (name == "constrained_max_affine") {
      Matrix a = n.matrix("A");
      Point b = n.vector("b");
      ConvexSet set = parse_set(n.object("set"));
      n.finish();
      return gallery::make_constrained_max_affine(a, b, set);
    }
    if (name == "sum_of_distances") {
      const Json& list = n.raw("sets");
      if (!list.is_array() || list.empty()) throw ParseError(n.at("sets"), "expected a nonempty array of sets");
      std::vector<ConvexSet> sets;
      for (std::size_t i = 0; i < list.size(); ++i) {
        sets.push_back(parse_set(Node(list[i], n.at("sets") + "[" + std::to_string(i) + "]")));
      }
      std::optional<ConvexSet> g_set;
      if (n.has("g_set")) g_set = parse_set(n.object("g_set"));
      n.finish();
      return gallery::make_sum_of_distances(std::move(sets), std::move(g_set));
    }
    if (name == "dual_finite") {
      Point h0 = n.vector("h0");
      Matrix h = n.matrix("H");
      if (h.cols() != h0.size()) throw ParseError(n.at("H"), "needs one column per entry of h0");
      const double lambda = parse_lambda(n);
      gallery::DualG0 g0;
      if (n.has("g0")) {
        const Json& v = n.raw("g0");
        if (v.is_string() && v.get<std::string>() == "none") {
        } else if (v.is_string() && v.get<std::string>() == "l1") {
          g0 = gallery::DualL1{};
        } else if (v.is_object()) {
          Node box(v, n.at("g0"));
          if (box.text("type") != "box") throw ParseError(box.at("type"), "only \"box\" is supported");
          g0 = gallery::DualBox{box.vector("lower"), box.vector("upper")};
          box.finish();
        } else {
          throw ParseError(n.at("g0"), "expected \"none\", \"l1\" or a box");
        }
      }
      n.finish();
      return gallery::make_dual_finite(h0, h, lambda, g0);
    }
    if (name == "unattained_inf") {
      n.finish();
      return gallery::make_unattained_inf();
    }
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ParseError("problem.params", e.what());
  }
  throw ParseError("problem.name", "unknown problem '" + name + "'");
}

/// Replaces the scalar at a dotted path ("rule.power", "rule.gammas.0") with `value`.
inline Json with_scalar(Json doc, const std::string& path, double value) {
  Json* cur = &doc;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (cur->is_object()) {
      if (!cur->contains(part)) throw ParseError(path, "no such field");
      cur = &(*cur)[part];
    } else if (cur->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw ParseError(path, "array index expected at '" + part + "'");
      }
      if (idx >= cur->size()) throw ParseError(path, "index out of range");
      cur = &(*cur)[idx];
    } else {
      throw ParseError(path, "path descends into a scalar");
    }
  }
  if (!cur->is_number()) throw ParseError(path, "not a scalar parameter");
  if (cur->is_number_integer() && std::floor(value) == value) {
    *cur = static_cast<long long>(value);
  } else {
    *cur = value;
  }
  return doc;
}

}  // namespace pss::config
