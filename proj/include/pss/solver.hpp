#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pss/errors.hpp"
#include "pss/functions.hpp"
#include "pss/point.hpp"
#include "pss/prox.hpp"
#include "pss/stepsize.hpp"

namespace pss {

enum class StopReason { kMaxIters, kStepTol, kTargetReached, kStationaryDenominator };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kMaxIters: return "max_iters";
    case StopReason::kStepTol: return "step_tol";
    case StopReason::kTargetReached: return "target_reached";
    case StopReason::kStationaryDenominator: return "stationary_denominator";
  }
  return "unknown";
}

/// One executed step k: data at x^k plus the step taken from it. Scalars are kept for every k;
/// the points are present only on rows selected by record_every.
struct IterateRecord {
  std::size_t k = 0;
  double value = 0.0;          // (f+g)(x^k)
  double best_value = 0.0;     // min_{i<=k} (f+g)(x^i)
  double ergodic_value = 0.0;  // (f+g)(xbar^k)
  double alpha = 0.0;
  double u_norm = 0.0;
  double w_norm = 0.0;
  double uw_norm = 0.0;    // ||u^k + w^k||
  double step_norm = 0.0;  // ||x^{k+1} - x^k||
  double beta = std::numeric_limits<double>::quiet_NaN();
  double target = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::optional<Point> x, u, w, ergodic_x;

  /// (||u|| + ||w||)^2, the Polyak denominator.
  double polyak_denominator() const { return (u_norm + w_norm) * (u_norm + w_norm); }
};

struct RunTrace {
  std::string problem;
  StepsizeRule rule = ConstantStep{};
  Eigen::Index dim = 0;
  double stop_tol = 0.0;
  std::size_t record_every = 1;
  Point x0;
  std::vector<IterateRecord> records;
  /// Last iterate produced; x^{records.size()} unless a Polyak stop fired before stepping.
  Point final_x;
  double final_value = 0.0;
  double final_best = 0.0;
  StopReason stop_reason = StopReason::kMaxIters;

  /// x^{k+1} for record k, or nullptr when that point was thinned out.
  const Point* next_point(std::size_t k) const {
    if (k + 1 < records.size()) return records[k + 1].x ? &*records[k + 1].x : nullptr;
    if (k + 1 == records.size()) return &final_x;
    return nullptr;
  }

  /// Index of the final iterate.
  std::size_t final_k() const { return records.size(); }
};

struct RunOptions {
  std::size_t max_iters = 1000;
  double stop_tol = 0.0;
  std::size_t record_every = 1;
};

inline double update_best(double best_prev, double value) { return std::min(best_prev, value); }

struct ErgodicState {
  Point point;
  double sigma = 0.0;
};

/// xbar^k = (1 - alpha_k/sigma_k) xbar^{k-1} + (alpha_k/sigma_k) x^k with sigma_k = sigma_{k-1} + alpha_k.
inline ErgodicState update_ergodic(const Point& ergodic_prev, double sigma_prev, double alpha_k, const Point& x_k) {
  if (!(sigma_prev > 0.0) || !(alpha_k > 0.0)) throw ConfigError("update_ergodic: sigma and alpha must be positive");
  const double sigma = sigma_prev + alpha_k;
  const double weight = alpha_k / sigma;
  return {(1.0 - weight) * ergodic_prev + weight * x_k, sigma};
}

struct StepResult {
  Point x_next;
  Point u;
};

/// x_next = prox_{alpha g}(x - alpha u), u the oracle's subgradient of f at x.
template <SubgradientOracle F, ProximalOracle G>
StepResult pss_step(const Point& x, const F& f, const G& g, double alpha, std::size_t iteration = 0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("pss_step: alpha must be positive");
  if (!g.in_domain(x)) throw ContractViolation("pss_step: iterate outside dom(g)", iteration);
  Point u = f.subgradient(x);
  Point x_next = g.prox(alpha, x - alpha * u);
  return {std::move(x_next), std::move(u)};
}

/// Runs the proximal subgradient splitting iteration from x0.
template <SubgradientOracle F, ProximalOracle G>
RunTrace run(const F& f, const G& g, const StepsizeRule& rule, const Point& x0, const RunOptions& options,
             std::string problem_name = {}) {
  validate(rule);
  if (options.max_iters == 0) throw ConfigError("run: max_iters must be positive");
  if (options.record_every == 0) throw ConfigError("run: record_every must be positive");
  if (!(options.stop_tol >= 0.0)) throw ConfigError("run: stop_tol must be nonnegative");
  require_finite(x0, "run: x0");
  if (!g.in_domain(x0)) throw ContractViolation("run: x0 outside dom(g)", 0);

  RunTrace trace;
  trace.problem = std::move(problem_name);
  trace.rule = rule;
  trace.dim = x0.size();
  trace.stop_tol = options.stop_tol;
  trace.record_every = options.record_every;
  trace.x0 = x0;
  trace.records.reserve(std::min<std::size_t>(options.max_iters, 1u << 20));

  auto objective = [&](const Point& x) { return f.value(x) + g.value(x); };

  Point x = x0;
  double best = std::numeric_limits<double>::infinity();
  ErgodicState ergodic;
  trace.stop_reason = StopReason::kMaxIters;
  bool stopped = false;

  for (std::size_t k = 0; k < options.max_iters; ++k) {
    if (!g.in_domain(x)) throw ContractViolation("run: iterate outside dom(g)", k);
    const double value = objective(x);
    if (!std::isfinite(value)) throw ContractViolation("run: objective not finite at iterate", k);
    Point u = f.subgradient(x);
    Point w = g.bounded_subgradient(x);

    IterateRecord rec;
    rec.k = k;
    rec.value = value;
    rec.u_norm = u.norm();
    rec.w_norm = w.norm();
    rec.uw_norm = (u + w).norm();

    double alpha = 0.0;
    if (const auto* c = std::get_if<ConstantStep>(&rule)) {
      alpha = c->alpha;
    } else if (const auto* e = std::get_if<ExogenousStep>(&rule)) {
      rec.beta = e->beta(k);
      alpha = exogenous_alpha(k, *e, u);
    } else {
      const auto& p = std::get<PolyakStep>(rule);
      rec.target = p.target.at(k);
      rec.gamma = p.gamma(k);
      const PolyakOutcome outcome = polyak_alpha(value, rec.target, rec.gamma, u, w);
      if (outcome.status != PolyakStatus::kStep) {
        trace.stop_reason = outcome.status == PolyakStatus::kTargetReached ? StopReason::kTargetReached
                                                                            : StopReason::kStationaryDenominator;
        trace.final_x = x;
        trace.final_value = value;
        stopped = true;
        break;
      }
      alpha = outcome.alpha;
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ContractViolation("run: stepsize not positive and finite", k);
    rec.alpha = alpha;

    best = update_best(best, value);
    rec.best_value = best;
    if (k == 0) {
      ergodic = {x, alpha};
    } else {
      ergodic = update_ergodic(ergodic.point, ergodic.sigma, alpha, x);
    }
    rec.ergodic_value = objective(ergodic.point);

    Point x_next = g.prox(alpha, x - alpha * u);
    require_finite(x_next, "run: prox output");
    rec.step_norm = (x_next - x).norm();

    if (k % options.record_every == 0) {
      rec.x = x;
      rec.u = std::move(u);
      rec.w = std::move(w);
      rec.ergodic_x = ergodic.point;
    }
    trace.records.push_back(std::move(rec));
    x = std::move(x_next);

    if (trace.records.back().step_norm <= options.stop_tol) {
      trace.stop_reason = StopReason::kStepTol;
      break;
    }
  }

  if (!stopped) {
    if (!g.in_domain(x)) throw ContractViolation("run: iterate outside dom(g)", trace.records.size());
    trace.final_value = objective(x);
    trace.final_x = std::move(x);
  }
  trace.final_best = std::min(best, trace.final_value);
  return trace;
}

}  // namespace pss
