#pragma once

// Deliberate trace corruptions for negative controls. Each returns a modified copy.

#include <cstddef>

#include "pss/errors.hpp"
#include "pss/solver.hpp"

namespace pss::corrupt {

/// Multiplies every recorded alpha_k by `factor`, leaving the iterates untouched.
inline RunTrace scale_alpha(RunTrace trace, double factor) {
  for (auto& r : trace.records) r.alpha *= factor;
  if (auto* c = std::get_if<ConstantStep>(&trace.rule)) c->alpha *= factor;
  return trace;
}

/// Adds `delta` to every value, best value and ergodic value.
inline RunTrace shift_values(RunTrace trace, double delta) {
  for (auto& r : trace.records) {
    r.value += delta;
    r.best_value += delta;
    r.ergodic_value += delta;
  }
  trace.final_value += delta;
  trace.final_best += delta;
  return trace;
}

/// Adds `delta` to the ergodic values only.
inline RunTrace shift_ergodic(RunTrace trace, double delta) {
  for (auto& r : trace.records) r.ergodic_value += delta;
  return trace;
}

/// Overwrites the recorded best value at record k.
inline RunTrace overwrite_best(RunTrace trace, std::size_t k, double value) {
  if (k >= trace.records.size()) throw ConfigError("overwrite_best: no such record");
  trace.records[k].best_value = value;
  return trace;
}

/// Moves iterate x^k (k == records.size() means the final iterate) by `delta` in every coordinate.
inline RunTrace perturb_point(RunTrace trace, std::size_t k, double delta) {
  if (k == trace.records.size()) {
    trace.final_x.array() += delta;
    return trace;
  }
  if (k > trace.records.size() || !trace.records[k].x) throw ConfigError("perturb_point: iterate not recorded");
  trace.records[k].x->array() += delta;
  return trace;
}

}  // namespace pss::corrupt
