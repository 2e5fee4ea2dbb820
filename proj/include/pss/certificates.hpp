#pragma once

// Mechanical checks of the method's per-iteration inequalities and rate bounds against a
// completed RunTrace. Every check is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pss/errors.hpp"
#include "pss/gallery.hpp"
#include "pss/point.hpp"
#include "pss/solver.hpp"
#include "pss/stepsize.hpp"

namespace pss::certificates {

inline constexpr double kRelativeSlack = 1e-9;
inline constexpr double kAbsoluteSlack = 1e-12;

/// s*, a minimizer witness, and dist(x0, S*) or the upper bound ||x0 - witness||.
struct GroundTruth {
  double s_star = 0.0;
  Point minimizer;
  double dist0 = 0.0;
  bool dist0_upper_bound = true;
};

inline GroundTruth make_ground_truth(const ProblemTruth& truth, const Point& x0) {
  if (!truth.attained) throw ConfigError("ground truth: optimal value not attained");
  return {truth.s_star, truth.minimizer, (x0 - truth.minimizer).norm(), true};
}

/// f + g evaluation and dom(g) membership for probe points.
struct ObjectiveView {
  std::function<double(const Point&)> value;
  std::function<bool(const Point&)> in_domain;
};

inline ObjectiveView view_of(const ProblemInstance& p) {
  return {[&p](const Point& x) { return p.objective(x); }, [&p](const Point& x) { return p.g.in_domain(x); }};
}

struct CertificateReport {
  std::string name;
  bool applicable = true;
  bool holds = false;
  /// rhs - lhs at the most violating condition; positive means satisfied.
  double worst_slack = std::numeric_limits<double>::infinity();
  /// Allowed numerical violation at that condition.
  double tolerance = 0.0;
  std::size_t witness_k = 0;
  std::size_t checked = 0;
  std::string note;
  std::vector<double> margins;
};

/// Folds inequalities lhs <= rhs into a report, tolerating 1e-9 * scale + 1e-12.
class Accumulator {
 public:
  explicit Accumulator(std::string name, bool keep_margins = false)
      : keep_margins_(keep_margins) {
    report_.name = std::move(name);
  }

  void add(std::size_t k, double lhs, double rhs, double scale) {
    add_with_tolerance(k, lhs, rhs, kRelativeSlack * std::abs(scale) + kAbsoluteSlack);
  }

  void add_with_tolerance(std::size_t k, double lhs, double rhs, double tolerance) {
    const double margin = rhs - lhs;
    ++report_.checked;
    if (keep_margins_) report_.margins.push_back(margin);
    const double normalized = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin + tolerance;
    if (report_.checked == 1 || normalized < worst_normalized_) {
      worst_normalized_ = normalized;
      report_.worst_slack = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin;
      report_.tolerance = tolerance;
      report_.witness_k = k;
    }
  }

  void note(const std::string& text) {
    if (!report_.note.empty()) report_.note += "; ";
    report_.note += text;
  }

  CertificateReport finish() {
    if (report_.checked == 0) {
      report_.applicable = false;
      report_.holds = false;
      if (report_.note.empty()) report_.note = "no checkable iterations";
      return report_;
    }
    report_.holds = worst_normalized_ >= 0.0;
    return report_;
  }

 private:
  CertificateReport report_;
  bool keep_margins_;
  double worst_normalized_ = std::numeric_limits<double>::infinity();
};

inline CertificateReport not_applicable(std::string name, std::string why) {
  CertificateReport r;
  r.name = std::move(name);
  r.applicable = false;
  r.holds = false;
  r.note = std::move(why);
  return r;
}

/// Running maxima C_k = max ||u^i + w^i||^2 and D_k = max (||u^i|| + rho_i)^2, and sums of alpha.
struct RunningSums {
  std::vector<double> c, d, alpha_sum, alpha_sq_sum, beta_sum, beta_sq_sum, best;
};

inline RunningSums running_sums(const RunTrace& trace) {
  RunningSums s;
  double c = 0.0, d = 0.0, a = 0.0, a2 = 0.0, b = 0.0, b2 = 0.0;
  for (const auto& r : trace.records) {
    c = std::max(c, r.uw_norm * r.uw_norm);
    d = std::max(d, r.polyak_denominator());
    a += r.alpha;
    a2 += r.alpha * r.alpha;
    if (std::isfinite(r.beta)) {
      b += r.beta;
      b2 += r.beta * r.beta;
    }
    s.c.push_back(c);
    s.d.push_back(d);
    s.alpha_sum.push_back(a);
    s.alpha_sq_sum.push_back(a2);
    s.beta_sum.push_back(b);
    s.beta_sq_sum.push_back(b2);
  }
  return s;
}

/// ||x^{k+1} - x||^2 <= ||x^k - x||^2 + 2 alpha_k [F(x) - F(x^k)] + alpha_k^2 ||u^k + w^k||^2
/// at every recorded k and probe x in dom(g).
inline CertificateReport check_key_inequality(const RunTrace& trace, const std::vector<Point>& probes,
                                              const ObjectiveView& objective) {
  Accumulator acc("key_inequality");
  std::vector<double> probe_values;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    if (!objective.in_domain(probes[j])) throw ConfigError("key_inequality: probe " + std::to_string(j) + " outside dom(g)");
    probe_values.push_back(objective.value(probes[j]));
  }
  std::size_t skipped = 0;
  for (const auto& r : trace.records) {
    const Point* next = trace.next_point(r.k);
    if (!r.x || !next) {
      ++skipped;
      continue;
    }
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const double before = (*r.x - probes[j]).squaredNorm();
      const double after = (*next - probes[j]).squaredNorm();
      const double rhs =
          before + 2.0 * r.alpha * (probe_values[j] - r.value) + r.alpha * r.alpha * r.uw_norm * r.uw_norm;
      acc.add(r.k, after, rhs, 1.0 + before);
    }
  }
  if (skipped > 0) acc.note(std::to_string(skipped) + " iterations skipped (points not recorded)");
  return acc.finish();
}

/// best_k - s* <= [dist0^2 + C_k sum alpha^2] / (2 sum alpha) at every k.
inline CertificateReport check_best_value_bound(const RunTrace& trace, const GroundTruth& truth) {
  Accumulator acc("best_value_bound");
  const RunningSums s = running_sums(trace);
  const double d2 = truth.dist0 * truth.dist0;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const double bound = (d2 + s.c[k] * s.alpha_sq_sum[k]) / (2.0 * s.alpha_sum[k]);
    const double gap = trace.records[k].best_value - truth.s_star;
    acc.add(k, gap, bound, 1.0 + std::abs(trace.records[k].best_value) + std::abs(truth.s_star) + bound);
  }
  if (truth.dist0_upper_bound) acc.note("dist0 upper-bound mode");
  return acc.finish();
}

/// Same right-hand side with (f+g)(xbar^k) on the left.
inline CertificateReport check_ergodic_bound(const RunTrace& trace, const GroundTruth& truth) {
  Accumulator acc("ergodic_bound");
  const RunningSums s = running_sums(trace);
  const double d2 = truth.dist0 * truth.dist0;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const double bound = (d2 + s.c[k] * s.alpha_sq_sum[k]) / (2.0 * s.alpha_sum[k]);
    const double gap = trace.records[k].ergodic_value - truth.s_star;
    acc.add(k, gap, bound, 1.0 + std::abs(trace.records[k].ergodic_value) + std::abs(truth.s_star) + bound);
  }
  if (truth.dist0_upper_bound) acc.note("dist0 upper-bound mode");
  return acc.finish();
}

/// Convexity sanity: (f+g)(xbar^k) <= max_{i<=k} (f+g)(x^i).
inline CertificateReport check_ergodic_jensen(const RunTrace& trace) {
  Accumulator acc("ergodic_jensen");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    worst = std::max(worst, r.value);
    acc.add(r.k, r.ergodic_value, worst, 1.0 + std::abs(worst));
  }
  return acc.finish();
}

/// (f+g)^k_best = min{(f+g)^{k-1}_best, (f+g)(x^k)} and the sequence is nonincreasing.
inline CertificateReport check_best_monotone(const RunTrace& trace) {
  Accumulator acc("best_monotone");
  double running = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    running = std::min(running, r.value);
    acc.add_with_tolerance(r.k, std::abs(r.best_value - running), 0.0, 0.0);
    if (std::isfinite(prev)) acc.add_with_tolerance(r.k, r.best_value, prev, 0.0);
    prev = r.best_value;
  }
  return acc.finish();
}

/// Constant step at the optimal alpha: at horizon K both
///   gap <= [d^2 + alpha^2 (K+1) C_K] / (2 (K+1) alpha)   and   that middle term <= d sqrt(C_K) / sqrt(K+1)
/// for the best value and the ergodic value.
inline CertificateReport check_constant_rate(const RunTrace& trace, const GroundTruth& truth) {
  const std::string name = "constant_rate";
  const auto* rule = std::get_if<ConstantStep>(&trace.rule);
  if (!rule) return not_applicable(name, "rule is not constant");
  if (trace.records.empty()) return not_applicable(name, "empty trace");
  Accumulator acc(name);
  const RunningSums s = running_sums(trace);
  const std::size_t horizon = trace.records.size() - 1;
  const double alpha = rule->alpha;
  const double c_k = s.c[horizon];
  const double d = truth.dist0;
  const double kp1 = static_cast<double>(horizon) + 1.0;
  const double middle = (d * d + alpha * alpha * kp1 * c_k) / (2.0 * kp1 * alpha);
  const double rate = d * std::sqrt(c_k) / std::sqrt(kp1);
  const auto& last = trace.records[horizon];

  const double optimal = (d > 0.0 && c_k > 0.0) ? constant_alpha(d, c_k, horizon) : 0.0;
  if (!(std::abs(alpha - optimal) <= 1e-9 * optimal)) {
    acc.note("alpha=" + std::to_string(alpha) + " differs from optimal " + std::to_string(optimal));
  }
  const double scale = 1.0 + std::abs(truth.s_star) + middle;
  auto check = [&](double lhs, double rhs, const char* label) {
    const double tol = kRelativeSlack * scale + kAbsoluteSlack;
    acc.add_with_tolerance(horizon, lhs, rhs, tol);
    if (rhs - lhs + tol < 0.0) acc.note(std::string(label) + " fails");
  };
  check(last.best_value - truth.s_star, middle, "best: first inequality");
  check(middle, rate, "best: second inequality");
  check(last.ergodic_value - truth.s_star, middle, "ergodic: first inequality");
  check(last.ergodic_value - truth.s_star, rate, "ergodic: rate");
  check(last.best_value - truth.s_star, rate, "best: rate");
  return acc.finish();
}

/// Exogenous steps: ||x^{k+1} - x*||^2 <= ||x^k - x*||^2 + (1 + rho)^2 beta_k^2.
inline CertificateReport check_exogenous_quasifejer(const RunTrace& trace, const GroundTruth& truth, double rho) {
  const std::string name = "exogenous_quasifejer";
  if (!std::holds_alternative<ExogenousStep>(trace.rule)) return not_applicable(name, "rule is not exogenous");
  Accumulator acc(name);
  const double factor = 1.0 + 2.0 * rho + rho * rho;
  for (const auto& r : trace.records) {
    const Point* next = trace.next_point(r.k);
    if (!r.x || !next) continue;
    const double before = (*r.x - truth.minimizer).squaredNorm();
    const double after = (*next - truth.minimizer).squaredNorm();
    acc.add(r.k, after, before + factor * r.beta * r.beta, 1.0 + before);
  }
  return acc.finish();
}

/// Exogenous steps: ||x^k - x^{k+1}|| <= sqrt(1 + 2 rho + rho^2) beta_k.
inline CertificateReport check_exogenous_step_bound(const RunTrace& trace, double rho) {
  const std::string name = "exogenous_step_bound";
  if (!std::holds_alternative<ExogenousStep>(trace.rule)) return not_applicable(name, "rule is not exogenous");
  Accumulator acc(name);
  const double factor = std::sqrt(1.0 + 2.0 * rho + rho * rho);
  for (const auto& r : trace.records) acc.add(r.k, r.step_norm, factor * r.beta, 1.0 + r.step_norm);
  return acc.finish();
}

/// Exogenous steps with S* nonempty:
///   gap_k <= eta [dist0^2 + (1 + 2 rho + rho^2) sum beta^2] / (2 sum beta),  eta = max{1, zeta},
/// for both the best and the ergodic value.
inline CertificateReport check_exogenous_value_bound(const RunTrace& trace, const GroundTruth& truth,
                                                     const AssumptionConstants& constants) {
  const std::string name = "exogenous_value_bound";
  if (!std::holds_alternative<ExogenousStep>(trace.rule)) return not_applicable(name, "rule is not exogenous");
  Accumulator acc(name);
  const RunningSums s = running_sums(trace);
  const double rho = constants.rho;
  const double eta = std::max(1.0, constants.zeta);
  const double d2 = truth.dist0 * truth.dist0;
  double worst_u = 0.0, worst_w = 0.0;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    worst_u = std::max(worst_u, r.u_norm);
    worst_w = std::max(worst_w, r.w_norm);
    const double bound = eta * (d2 + (1.0 + 2.0 * rho + rho * rho) * s.beta_sq_sum[k]) / (2.0 * s.beta_sum[k]);
    const double scale = 1.0 + std::abs(truth.s_star) + bound;
    acc.add(k, r.best_value - truth.s_star, bound, scale);
    acc.add(k, r.ergodic_value - truth.s_star, bound, scale);
  }
  if (worst_u > constants.zeta * (1.0 + 1e-12)) acc.note("observed ||u|| exceeds declared zeta");
  if (worst_w > constants.rho * (1.0 + 1e-12) + 1e-15) acc.note("observed ||w|| exceeds declared rho");
  return acc.finish();
}

inline const PolyakStep* polyak_rule(const RunTrace& trace) { return std::get_if<PolyakStep>(&trace.rule); }

/// Polyak steps with s_k >= s*: for x* in the level set,
///   ||x^{k+1} - x*||^2 <= ||x^k - x*||^2 - gamma (2 - gamma) (s_k - F(x^k))^2 / (||u^k|| + rho_k)^2
/// and plain distance monotonicity ||x^{k+1} - x*|| <= ||x^k - x*|| within 1e-12.
inline CertificateReport check_polyak_fejer(const RunTrace& trace, const GroundTruth& truth) {
  const std::string name = "polyak_fejer";
  const auto* rule = polyak_rule(trace);
  if (!rule) return not_applicable(name, "rule is not polyak");
  for (const auto& r : trace.records) {
    if (r.target < truth.s_star) {
      return not_applicable(name, "target below s* at k=" + std::to_string(r.k) + " (inconsistent target)");
    }
  }
  Accumulator acc(name);
  const double gamma = rule->gamma_floor;
  for (const auto& r : trace.records) {
    const Point* next = trace.next_point(r.k);
    if (!r.x || !next) continue;
    const double before = (*r.x - truth.minimizer).squaredNorm();
    const double after = (*next - truth.minimizer).squaredNorm();
    const double gap = r.target - r.value;
    const double decrement = gamma * (2.0 - gamma) * gap * gap / r.polyak_denominator();
    acc.add(r.k, after, before - decrement, 1.0 + before);
    acc.add_with_tolerance(r.k, std::sqrt(after), std::sqrt(before), 1e-12);
  }
  if (trace.records.empty()) {
    acc.note("stopped at k=0 (" + to_string(trace.stop_reason) + ")");
    if (trace.stop_reason == StopReason::kTargetReached) {
      acc.add_with_tolerance(0, trace.final_value, polyak_rule(trace)->target.at(0), 0.0);
    }
  }
  return acc.finish();
}

/// min_{i<=k} (F(x^i) - s_i) <= sqrt(D_k / (gamma (2 - gamma))) dist / sqrt(k + 1) with D_k the
/// running max of (||u^i|| + rho_i)^2. With a constant target this is best_k - s_tilde.
inline CertificateReport check_polyak_complexity(const RunTrace& trace, double s_tilde, double dist_level) {
  const std::string name = "polyak_complexity";
  const auto* rule = polyak_rule(trace);
  if (!rule) return not_applicable(name, "rule is not polyak");
  if (!(dist_level >= 0.0) || !std::isfinite(dist_level)) return not_applicable(name, "missing level-set distance");
  Accumulator acc(name);
  const RunningSums s = running_sums(trace);
  const double gamma = rule->gamma_floor;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    min_gap = std::min(min_gap, r.value - r.target);
    const double bound =
        std::sqrt(s.d[k] / (gamma * (2.0 - gamma))) * dist_level / std::sqrt(static_cast<double>(k) + 1.0);
    acc.add(k, min_gap, bound, 1.0 + std::abs(r.value) + std::abs(s_tilde) + bound);
  }
  if (!rule->target.is_constant()) acc.note("non-constant target: checked min(F(x^i) - s_i)");
  return acc.finish();
}

/// Running minimum over i <= k of sqrt(i + 1) * (F(x^i) - s*), the finite-horizon statistic for the
/// liminf statement.
inline std::vector<double> scaled_gap_running_min(const RunTrace& trace, double s_star) {
  std::vector<double> out;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    m = std::min(m, std::sqrt(static_cast<double>(r.k) + 1.0) * (r.value - s_star));
    out.push_back(m);
  }
  return out;
}

/// Running min of sqrt(k+1) * gap over the last `fraction` of the run: nonincreasing, and strictly
/// below its value at the start of the tail unless the gap already reached zero.
inline CertificateReport check_scaled_gap_tail(const RunTrace& trace, double s_star, double fraction = 0.5) {
  Accumulator acc("scaled_gap_tail");
  const auto stat = scaled_gap_running_min(trace, s_star);
  if (stat.size() < 2) return not_applicable("scaled_gap_tail", "fewer than two iterations");
  const auto start = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor((1.0 - fraction) * static_cast<double>(stat.size()))));
  for (std::size_t k = start; k < stat.size(); ++k) acc.add_with_tolerance(k, stat[k], stat[k - 1], 0.0);
  const double head = stat[start - 1];
  if (head > 0.0) {
    acc.add_with_tolerance(stat.size() - 1, stat.back(), std::nextafter(head, -1.0), 0.0);
  }
  acc.note("running min " + std::to_string(head) + " -> " + std::to_string(stat.back()));
  return acc.finish();
}

/// Target limit below the optimum: final best <= s* + ((2 - gamma)/gamma)(s* - s_tilde) + tolerance.
inline CertificateReport check_inconsistent_target(const RunTrace& trace, const GroundTruth& truth, double s_tilde,
                                                   double gamma_floor, double tolerance = 1e-6) {
  const std::string name = "inconsistent_target";
  if (!polyak_rule(trace)) return not_applicable(name, "rule is not polyak");
  if (!(s_tilde < truth.s_star)) return not_applicable(name, "target limit is not below s*");
  if (!(gamma_floor > 0.0 && gamma_floor <= 1.0)) throw ConfigError("inconsistent_target: gamma_floor must lie in (0, 1]");
  Accumulator acc(name);
  const double ceiling = truth.s_star + (2.0 - gamma_floor) / gamma_floor * (truth.s_star - s_tilde);
  acc.add_with_tolerance(trace.final_k(), trace.final_best, ceiling, tolerance);
  acc.note("ceiling=" + std::to_string(ceiling));
  return acc.finish();
}

/// Dispatches on s_tilde vs s*: consistent targets get the complexity bound at the horizon and
/// best >= s*; inconsistent targets get the ceiling.
inline CertificateReport check_summary_corollary(const RunTrace& trace, const GroundTruth& truth, double s_tilde) {
  const std::string name = "summary_corollary";
  const auto* rule = polyak_rule(trace);
  if (!rule) return not_applicable(name, "rule is not polyak");
  if (s_tilde < truth.s_star) {
    CertificateReport r = check_inconsistent_target(trace, truth, s_tilde, rule->gamma_floor);
    r.name = name;
    r.note = "branch=inconsistent; " + r.note;
    return r;
  }
  Accumulator acc(name);
  acc.note("branch=consistent");
  const RunningSums s = running_sums(trace);
  const std::size_t horizon = trace.final_k();
  const double d_k = s.d.empty() ? 0.0 : s.d.back();
  const double gamma = rule->gamma_floor;
  const double bound =
      std::sqrt(d_k / (gamma * (2.0 - gamma))) * truth.dist0 / std::sqrt(static_cast<double>(horizon) + 1.0);
  const double scale = 1.0 + std::abs(s_tilde) + bound;
  acc.add(horizon, trace.final_best - s_tilde, bound, scale);
  acc.add(horizon, truth.s_star, trace.final_best, scale);
  return acc.finish();
}

/// Largest observed ||u^k||: the a-posteriori A1 constant over the run's iterates.
inline double empirical_zeta(const RunTrace& trace) {
  double z = 0.0;
  for (const auto& r : trace.records) z = std::max(z, r.u_norm);
  return z;
}

/// Finite-horizon surrogate for S* empty: ||x^K|| >= factor * ||x^0||.
inline CertificateReport check_unbounded_iterates(const RunTrace& trace, double factor) {
  Accumulator acc("unbounded_iterates");
  const double start = trace.x0.norm();
  acc.add_with_tolerance(trace.final_k(), factor * start, trace.final_x.norm(), 0.0);
  acc.note("||x^K||=" + std::to_string(trace.final_x.norm()));
  return acc.finish();
}

/// Finite-horizon surrogate for convergence of the best values: best_K - s* <= threshold.
inline CertificateReport check_final_gap(const RunTrace& trace, const GroundTruth& truth, double threshold) {
  Accumulator acc("final_gap");
  acc.add_with_tolerance(trace.final_k(), trace.final_best - truth.s_star, threshold, 0.0);
  return acc.finish();
}

struct Calibration {
  double alpha = 0.0;
  double c_k = 0.0;
  std::size_t rounds = 0;
  bool converged = false;
  RunTrace trace;
};

/// Two-pass protocol for the constant step: pilot runs to horizon K re-estimate C_K until the run's
/// own C_K equals the value used in alpha = dist0 / (sqrt(C_K) sqrt(K + 1)).
template <SubgradientOracle F, ProximalOracle G>
Calibration calibrate_constant_alpha(const F& f, const G& g, const Point& x0, double dist0, std::size_t horizon,
                                     std::size_t max_rounds = 20, std::size_t record_every = 1,
                                     const std::string& name = {}) {
  if (!(dist0 > 0.0)) throw ConfigError("calibrate_constant_alpha: dist0 must be positive");
  const Point u0 = f.subgradient(x0);
  double c = (u0 + g.bounded_subgradient(x0)).squaredNorm();
  if (!(c > 0.0)) c = 1.0;
  Calibration out;
  const RunOptions options{horizon + 1, 0.0, record_every};
  for (std::size_t round = 1; round <= max_rounds; ++round) {
    out.alpha = constant_alpha(dist0, c, horizon);
    out.c_k = c;
    out.rounds = round;
    out.trace = run(f, g, ConstantStep{out.alpha}, x0, options, name);
    double observed = 0.0;
    for (const auto& r : out.trace.records) observed = std::max(observed, r.uw_norm * r.uw_norm);
    if (observed == c && out.trace.records.size() == horizon + 1) {
      out.converged = true;
      return out;
    }
    c = observed > 0.0 ? observed : c;
  }
  return out;
}

}  // namespace pss::certificates
