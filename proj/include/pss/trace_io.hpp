#pragma once

// CSV traces, run metadata and flat key=value certificate reports.

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pss/certificates.hpp"
#include "pss/errors.hpp"
#include "pss/gallery.hpp"
#include "pss/solver.hpp"
#include "pss/stepsize.hpp"

namespace pss::io {

using Json = nlohmann::json;

inline constexpr int kTraceSchemaVersion = 1;

inline const std::vector<std::string>& scalar_columns() {
  static const std::vector<std::string> cols{"k", "value", "best", "ergodic_value", "alpha", "u_norm", "w_norm",
                                             "step_norm"};
  return cols;
}

/// 17 significant digits; round-trips every double.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("trace: bad number '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("trace: bad number '" + s + "'");
  return x;
}

inline std::vector<std::string> point_columns(Eigen::Index dim) {
  std::vector<std::string> cols;
  for (const char* prefix : {"x_", "u_", "w_", "ergodic_x_"}) {
    for (Eigen::Index i = 0; i < dim; ++i) cols.push_back(prefix + std::to_string(i));
  }
  return cols;
}

inline std::string csv_header(Eigen::Index dim, bool points) {
  std::string line;
  for (const auto& c : scalar_columns()) line += (line.empty() ? "" : ",") + c;
  if (points) {
    for (const auto& c : point_columns(dim)) line += "," + c;
  }
  return line;
}

inline void write_csv_row(std::ostream& out, const IterateRecord& r, Eigen::Index dim, bool points) {
  out << r.k << ',' << fmt(r.value) << ',' << fmt(r.best_value) << ',' << fmt(r.ergodic_value) << ','
      << fmt(r.alpha) << ',' << fmt(r.u_norm) << ',' << fmt(r.w_norm) << ',' << fmt(r.step_norm);
  if (points) {
    for (const auto* p : {&r.x, &r.u, &r.w, &r.ergodic_x}) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        out << ',';
        if (*p) out << fmt((**p)[i]);
      }
    }
  }
  out << '\n';
}

/// One row per executed step. Point columns are empty on thinned rows.
inline void write_trace_csv(std::ostream& out, const RunTrace& trace, bool points) {
  out << csv_header(trace.dim, points) << '\n';
  for (const auto& r : trace.records) write_csv_row(out, r, trace.dim, points);
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> parts;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) parts.push_back(cell);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

/// Reads the CSV back into records. ||u + w|| is exact when u and w columns are present and
/// falls back to the upper bound ||u|| + ||w|| otherwise.
inline std::vector<IterateRecord> read_trace_csv(std::istream& in, Eigen::Index dim, bool* exact_uw = nullptr) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty file");
  const auto header = split(line);
  const auto& base = scalar_columns();
  if (header.size() < base.size() || !std::equal(base.begin(), base.end(), header.begin())) {
    throw ConfigError("trace: unexpected header '" + line + "'");
  }
  const bool points = header.size() > base.size();
  if (points && header.size() != base.size() + point_columns(dim).size()) {
    throw ConfigError("trace: point columns do not match dimension " + std::to_string(dim));
  }
  if (exact_uw) *exact_uw = points;
  std::vector<IterateRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ConfigError("trace: wrong cell count on line " + std::to_string(line_no));
    IterateRecord r;
    r.k = static_cast<std::size_t>(std::stoull(cells[0]));
    r.value = parse_double(cells[1]);
    r.best_value = parse_double(cells[2]);
    r.ergodic_value = parse_double(cells[3]);
    r.alpha = parse_double(cells[4]);
    r.u_norm = parse_double(cells[5]);
    r.w_norm = parse_double(cells[6]);
    r.step_norm = parse_double(cells[7]);
    r.uw_norm = r.u_norm + r.w_norm;
    if (points && !cells[base.size()].empty()) {
      std::optional<Point>* targets[] = {&r.x, &r.u, &r.w, &r.ergodic_x};
      std::size_t c = base.size();
      for (auto* t : targets) {
        Point p(dim);
        for (Eigen::Index i = 0; i < dim; ++i) p[i] = parse_double(cells[c++]);
        *t = std::move(p);
      }
      r.uw_norm = (*r.u + *r.w).norm();
    }
    if (r.k != records.size()) throw ConfigError("trace: iteration index out of sequence on line " + std::to_string(line_no));
    records.push_back(std::move(r));
  }
  return records;
}

inline Json to_json(const Point& x) { return Json(to_vector(x)); }

inline Point point_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return p;
}

inline Json rule_to_json(const StepsizeRule& rule) {
  if (const auto* c = std::get_if<ConstantStep>(&rule)) return {{"type", "constant"}, {"alpha", c->alpha}};
  if (const auto* e = std::get_if<ExogenousStep>(&rule)) {
    return {{"type", "exogenous"}, {"scale", e->scale}, {"power", e->power}};
  }
  const auto& p = std::get<PolyakStep>(rule);
  return {{"type", "polyak"},
          {"gammas", p.gammas},
          {"gamma_floor", p.gamma_floor},
          {"target", {{"limit", p.target.limit}, {"excess", p.target.excess}, {"excess_power", p.target.excess_power}}}};
}

inline StepsizeRule rule_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") return ConstantStep{j.at("alpha").get<double>()};
  if (type == "exogenous") return ExogenousStep{j.at("scale").get<double>(), j.at("power").get<double>()};
  if (type != "polyak") throw ConfigError("meta: unknown rule '" + type + "'");
  PolyakStep p;
  p.gammas = j.at("gammas").get<std::vector<double>>();
  p.gamma_floor = j.at("gamma_floor").get<double>();
  const Json& t = j.at("target");
  p.target = {t.at("limit").get<double>(), t.at("excess").get<double>(), t.at("excess_power").get<double>()};
  return p;
}

/// Everything `check` needs besides the CSV: rule, start, final iterate, truth and constants.
inline Json run_metadata(const RunTrace& trace, const ProblemInstance& problem, const Json& problem_params) {
  Json meta;
  meta["schema_version"] = kTraceSchemaVersion;
  meta["problem"] = {{"name", problem.name}, {"params", problem_params}, {"dim", problem.dim}};
  meta["rule"] = rule_to_json(trace.rule);
  meta["run"] = {{"x0", to_json(trace.x0)},
                 {"stop_tol", trace.stop_tol},
                 {"record_every", trace.record_every},
                 {"stop_reason", to_string(trace.stop_reason)},
                 {"iterations", trace.records.size()}};
  meta["final"] = {{"x", to_json(trace.final_x)}, {"value", trace.final_value}, {"best", trace.final_best}};
  meta["constants"] = {{"zeta", problem.constants.zeta}, {"rho", problem.constants.rho}};
  Json truth = {{"attained", problem.truth.attained}, {"s_star", problem.truth.s_star}, {"oracle", problem.truth.oracle}};
  if (problem.truth.attained) truth["minimizer"] = to_json(problem.truth.minimizer);
  meta["truth"] = truth;
  return meta;
}

inline StopReason stop_reason_from(const std::string& s) {
  for (auto r : {StopReason::kMaxIters, StopReason::kStepTol, StopReason::kTargetReached,
                 StopReason::kStationaryDenominator}) {
    if (to_string(r) == s) return r;
  }
  throw ConfigError("meta: unknown stop reason '" + s + "'");
}

/// Rebuilds a RunTrace from CSV records and metadata; beta, target and gamma are recomputed from the rule.
inline RunTrace trace_from(std::vector<IterateRecord> records, const Json& meta) {
  RunTrace t;
  t.problem = meta.at("problem").at("name").get<std::string>();
  t.rule = rule_from_json(meta.at("rule"));
  const Json& run = meta.at("run");
  t.x0 = point_from_json(run.at("x0"), "meta.run.x0");
  t.dim = t.x0.size();
  t.stop_tol = run.at("stop_tol").get<double>();
  t.record_every = run.at("record_every").get<std::size_t>();
  t.stop_reason = stop_reason_from(run.at("stop_reason").get<std::string>());
  const Json& fin = meta.at("final");
  t.final_x = point_from_json(fin.at("x"), "meta.final.x");
  t.final_value = fin.at("value").get<double>();
  t.final_best = fin.at("best").get<double>();
  for (auto& r : records) {
    if (const auto* e = std::get_if<ExogenousStep>(&t.rule)) r.beta = e->beta(r.k);
    if (const auto* p = std::get_if<PolyakStep>(&t.rule)) {
      r.target = p->target.at(r.k);
      r.gamma = p->gamma(r.k);
    }
  }
  t.records = std::move(records);
  return t;
}

/// Flat key=value lines, one certificate field per line.
inline void write_report(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& header,
                         const std::vector<certificates::CertificateReport>& reports) {
  for (const auto& [k, v] : header) out << k << '=' << v << '\n';
  bool all = true;
  for (const auto& r : reports) {
    const std::string p = "certificate." + r.name + ".";
    out << p << "applicable=" << (r.applicable ? "true" : "false") << '\n';
    out << p << "holds=" << (r.holds ? "true" : "false") << '\n';
    out << p << "worst_slack=" << fmt(r.worst_slack) << '\n';
    out << p << "tolerance=" << fmt(r.tolerance) << '\n';
    out << p << "witness_k=" << r.witness_k << '\n';
    out << p << "checked=" << r.checked << '\n';
    if (!r.note.empty()) out << p << "note=" << r.note << '\n';
    all = all && r.holds;
  }
  out << "summary.all_hold=" << (all ? "true" : "false") << '\n';
}

/// Parses key=value lines back into pairs, in order.
inline std::vector<std::pair<std::string, std::string>> read_report(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return kv;
}

/// One line per certificate for terminal output.
inline std::string summary_line(const certificates::CertificateReport& r) {
  std::string s = r.holds ? "PASS " : (r.applicable ? "FAIL " : "N/A  ");
  s += r.name + " worst_slack=" + fmt(r.worst_slack) + " k=" + std::to_string(r.witness_k) +
       " checked=" + std::to_string(r.checked);
  if (!r.note.empty()) s += " (" + r.note + ")";
  return s;
}

}  // namespace pss::io
