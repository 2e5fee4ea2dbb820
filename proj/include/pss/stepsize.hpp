#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "pss/errors.hpp"
#include "pss/point.hpp"

namespace pss {

struct ConstantStep {
  double alpha = 1.0;
};

/// beta_k = scale / (k + 1)^power; power in (1/2, 1] keeps sum(beta^2) finite and sum(beta) infinite.
struct ExogenousStep {
  double scale = 1.0;
  double power = 0.51;

  double beta(std::size_t k) const { return scale / std::pow(static_cast<double>(k) + 1.0, power); }
};

/// Nonincreasing target s_k = limit + excess / (k + 1)^excess_power.
struct TargetSchedule {
  double limit = 0.0;
  double excess = 0.0;
  double excess_power = 1.0;

  double at(std::size_t k) const {
    if (excess == 0.0) return limit;
    return limit + excess / std::pow(static_cast<double>(k) + 1.0, excess_power);
  }
  bool is_constant() const { return excess == 0.0; }
};

/// Polyak-type rule: gamma_k cycles through `gammas`, each within [gamma_floor, 2 - gamma_floor].
struct PolyakStep {
  std::vector<double> gammas{1.0};
  double gamma_floor = 1.0;
  TargetSchedule target;

  double gamma(std::size_t k) const { return gammas[k % gammas.size()]; }
};

using StepsizeRule = std::variant<ConstantStep, ExogenousStep, PolyakStep>;

inline std::string rule_name(const StepsizeRule& rule) {
  switch (rule.index()) {
    case 0: return "constant";
    case 1: return "exogenous";
    default: return "polyak";
  }
}

inline void validate(const StepsizeRule& rule) {
  if (const auto* c = std::get_if<ConstantStep>(&rule)) {
    if (!(c->alpha > 0.0) || !std::isfinite(c->alpha)) throw ConfigError("constant rule: alpha must be positive");
  } else if (const auto* e = std::get_if<ExogenousStep>(&rule)) {
    if (!(e->scale > 0.0) || !std::isfinite(e->scale)) throw ConfigError("exogenous rule: scale must be positive");
    if (!(e->power > 0.5 && e->power <= 1.0)) throw ConfigError("exogenous rule: power must lie in (0.5, 1]");
  } else {
    const auto& p = std::get<PolyakStep>(rule);
    if (!(p.gamma_floor > 0.0 && p.gamma_floor <= 1.0)) throw ConfigError("polyak rule: gamma_floor must lie in (0, 1]");
    if (p.gammas.empty()) throw ConfigError("polyak rule: at least one gamma required");
    for (double g : p.gammas) {
      if (!(g >= p.gamma_floor && g <= 2.0 - p.gamma_floor)) {
        throw ConfigError("polyak rule: gamma must lie in [gamma_floor, 2 - gamma_floor]");
      }
    }
    if (!std::isfinite(p.target.limit)) throw ConfigError("polyak rule: target limit must be finite");
    if (!(p.target.excess >= 0.0) || !std::isfinite(p.target.excess)) {
      throw ConfigError("polyak rule: target excess must be nonnegative");
    }
    if (!(p.target.excess_power > 0.0)) throw ConfigError("polyak rule: target excess_power must be positive");
  }
}

/// Step minimizing the constant-step rate bound: dist0 / (sqrt(Ck) * sqrt(horizon + 1)).
inline double constant_alpha(double dist0, double c_k, std::size_t horizon) {
  if (!(dist0 > 0.0) || !(c_k > 0.0)) throw ConfigError("constant_alpha: inputs must be positive");
  return dist0 / (std::sqrt(c_k) * std::sqrt(static_cast<double>(horizon) + 1.0));
}

/// beta_k / max{1, ||u||}.
inline double exogenous_alpha(std::size_t k, const ExogenousStep& schedule, const Point& u) {
  const double beta = schedule.beta(k);
  if (!(beta > 0.0)) throw ConfigError("exogenous_alpha: beta_k must be positive");
  return beta / std::max(1.0, u.norm());
}

enum class PolyakStatus { kStep, kTargetReached, kStationaryDenominator };

struct PolyakOutcome {
  PolyakStatus status = PolyakStatus::kStep;
  double alpha = 0.0;
  /// (||u|| + rho_k)^2
  double denominator = 0.0;
};

inline constexpr double kPolyakDenominatorFloor = 1e-16;

/// gamma_k (value - s_k) / (||u|| + ||w||)^2, or the reason no step is defined.
inline PolyakOutcome polyak_alpha(double value, double s_k, double gamma_k, const Point& u, const Point& w,
                                  double denominator_floor = kPolyakDenominatorFloor) {
  const double u_norm = u.norm();
  const double rho_k = w.norm();
  const double denom = u_norm * u_norm + 2.0 * rho_k * u_norm + rho_k * rho_k;
  const double gap = value - s_k;
  if (!(gap > 0.0)) return {PolyakStatus::kTargetReached, 0.0, denom};
  if (denom < denominator_floor) return {PolyakStatus::kStationaryDenominator, 0.0, denom};
  return {PolyakStatus::kStep, gamma_k * gap / denom, denom};
}

}  // namespace pss
