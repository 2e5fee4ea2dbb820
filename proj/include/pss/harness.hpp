#pragma once

// Experiment runner behind the CLI: run, sweep, check, list-problems.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pss/certificates.hpp"
#include "pss/config.hpp"
#include "pss/corrupt.hpp"
#include "pss/gallery.hpp"
#include "pss/random.hpp"
#include "pss/solver.hpp"
#include "pss/trace_io.hpp"

namespace pss::harness {

namespace fs = std::filesystem;
using Json = nlohmann::json;
namespace cert = certificates;

enum ExitCode : int { kOk = 0, kCertificateFailure = 1, kParseError = 2, kContractViolation = 3 };

inline constexpr const char* kOutputRootVariable = "PSS_OUTPUT_DIR";

inline fs::path output_root() {
  const char* env = std::getenv(kOutputRootVariable);
  return (env && *env) ? fs::path(env) : fs::path("pss_output");
}

/// Probe points in dom(g): the start, the witness (if any) and `count` prox-mapped uniform draws.
inline std::vector<Point> make_probes(const ProblemInstance& problem, const Point& x0, std::size_t count,
                                      std::uint64_t seed) {
  std::vector<Point> probes{x0};
  Point center = x0;
  if (problem.truth.attained) {
    probes.push_back(problem.truth.minimizer);
    center = problem.truth.minimizer;
  }
  const double radius = 1.0 + (x0 - center).norm();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < count; ++i) {
    const Point z = center + rng.uniform_point(problem.dim, -radius, radius);
    probes.push_back(problem.g.prox(1.0, z));
  }
  return probes;
}

inline Point start_point(const config::RunConfig& run, const ProblemInstance& problem) {
  if (const auto* p = std::get_if<Point>(&run.x0)) {
    if (p->size() != problem.dim) {
      throw config::ParseError("run.x0", "length " + std::to_string(p->size()) + " does not match dimension " +
                                             std::to_string(problem.dim));
    }
    return *p;
  }
  if (const auto* r = std::get_if<config::RandomStart>(&run.x0)) {
    Rng rng(run.seed);
    return problem.g.prox(1.0, rng.uniform_point(problem.dim, r->lower, r->upper));
  }
  return problem.default_x0;
}

struct CheckPlan {
  std::vector<std::string> checks;  // empty: automatic selection
  std::size_t probes = 50;
  std::uint64_t seed = 1;
  double growth_factor = 10.0;
  double tail_fraction = 0.5;
  double target_tolerance = 1e-6;
  std::optional<double> gap_threshold;
  std::optional<double> rho_override;
  bool expect_optimal_alpha = false;
};

inline bool alpha_is_optimal(const RunTrace& trace, const cert::GroundTruth& truth) {
  const auto* c = std::get_if<ConstantStep>(&trace.rule);
  if (!c || trace.records.empty() || !(truth.dist0 > 0.0)) return false;
  const auto sums = cert::running_sums(trace);
  if (!(sums.c.back() > 0.0)) return false;
  const double optimal = constant_alpha(truth.dist0, sums.c.back(), trace.records.size() - 1);
  return std::abs(c->alpha - optimal) <= 1e-9 * optimal;
}

inline std::vector<std::string> automatic_checks(const RunTrace& trace, const ProblemInstance& problem,
                                                 const std::optional<cert::GroundTruth>& truth, const CheckPlan& plan) {
  std::vector<std::string> out{"best_monotone", "ergodic_jensen"};
  const bool consecutive_points = trace.record_every == 1 && !trace.records.empty() && trace.records.front().x;
  if (consecutive_points) out.push_back("key_inequality");
  if (truth) {
    out.push_back("best_value_bound");
    out.push_back("ergodic_bound");
  }
  if (std::holds_alternative<ConstantStep>(trace.rule) && truth &&
      (plan.expect_optimal_alpha || alpha_is_optimal(trace, *truth))) {
    out.push_back("constant_rate");
  }
  if (std::holds_alternative<ExogenousStep>(trace.rule)) {
    out.push_back("exogenous_step_bound");
    if (truth && consecutive_points) out.push_back("exogenous_quasifejer");
    if (truth) out.push_back("exogenous_value_bound");
  }
  if (const auto* p = std::get_if<PolyakStep>(&trace.rule); p && truth) {
    const double s_tilde = p->target.limit;
    if (s_tilde >= truth->s_star) {
      if (consecutive_points || trace.records.empty()) out.push_back("polyak_fejer");
      out.push_back("polyak_complexity");
      if (s_tilde == truth->s_star) out.push_back("scaled_gap_tail");
    } else {
      out.push_back("inconsistent_target");
    }
    out.push_back("summary_corollary");
  }
  if (!problem.truth.attained) out.push_back("unbounded_iterates");
  if (plan.gap_threshold && truth) out.push_back("final_gap");
  return out;
}

inline cert::CertificateReport evaluate_one(const std::string& name, const RunTrace& trace,
                                            const ProblemInstance& problem,
                                            const std::optional<cert::GroundTruth>& truth, const CheckPlan& plan) {
  const cert::GroundTruth* gt = truth ? &*truth : nullptr;
  const std::string missing = "no attained optimum";
  const double rho = plan.rho_override.value_or(problem.constants.rho);
  if (name == "best_monotone") return cert::check_best_monotone(trace);
  if (name == "ergodic_jensen") return cert::check_ergodic_jensen(trace);
  if (name == "key_inequality") {
    return cert::check_key_inequality(trace, make_probes(problem, trace.x0, plan.probes, plan.seed), cert::view_of(problem));
  }
  if (name == "exogenous_step_bound") return cert::check_exogenous_step_bound(trace, rho);
  if (name == "unbounded_iterates") return cert::check_unbounded_iterates(trace, plan.growth_factor);
  if (!gt) return cert::not_applicable(name, missing);
  if (name == "best_value_bound") return cert::check_best_value_bound(trace, *gt);
  if (name == "ergodic_bound") return cert::check_ergodic_bound(trace, *gt);
  if (name == "constant_rate") return cert::check_constant_rate(trace, *gt);
  if (name == "exogenous_quasifejer") return cert::check_exogenous_quasifejer(trace, *gt, rho);
  if (name == "exogenous_value_bound") {
    AssumptionConstants c = problem.constants;
    c.rho = rho;
    return cert::check_exogenous_value_bound(trace, *gt, c);
  }
  if (name == "final_gap") {
    if (!plan.gap_threshold) return cert::not_applicable(name, "no gap_threshold configured");
    return cert::check_final_gap(trace, *gt, *plan.gap_threshold);
  }
  const auto* p = std::get_if<PolyakStep>(&trace.rule);
  const double s_tilde = p ? p->target.limit : 0.0;
  if (name == "polyak_fejer") return cert::check_polyak_fejer(trace, *gt);
  if (name == "polyak_complexity") return cert::check_polyak_complexity(trace, s_tilde, gt->dist0);
  if (name == "scaled_gap_tail") return cert::check_scaled_gap_tail(trace, gt->s_star, plan.tail_fraction);
  if (name == "inconsistent_target") {
    if (!p) return cert::not_applicable(name, "rule is not polyak");
    return cert::check_inconsistent_target(trace, *gt, s_tilde, p->gamma_floor, plan.target_tolerance);
  }
  if (name == "summary_corollary") return cert::check_summary_corollary(trace, *gt, s_tilde);
  throw config::ParseError("certificates.checks", "unknown check '" + name + "'");
}

inline std::vector<cert::CertificateReport> evaluate(const RunTrace& trace, const ProblemInstance& problem,
                                                     const CheckPlan& plan) {
  std::optional<cert::GroundTruth> truth;
  if (problem.truth.attained) truth = cert::make_ground_truth(problem.truth, trace.x0);
  const auto names = plan.checks.empty() ? automatic_checks(trace, problem, truth, plan) : plan.checks;
  std::vector<cert::CertificateReport> reports;
  for (const auto& n : names) reports.push_back(evaluate_one(n, trace, problem, truth, plan));
  return reports;
}

inline bool all_hold(const std::vector<cert::CertificateReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.holds; });
}

inline StepsizeRule resolve_rule(const config::RuleConfig& rule, const ProblemInstance& problem) {
  if (rule.type == "constant") return ConstantStep{rule.alpha};
  if (rule.type == "exogenous") return rule.exogenous;
  if (rule.type == "polyak") {
    PolyakStep p;
    p.gammas = rule.gammas;
    p.gamma_floor = rule.gamma_floor;
    if (rule.target_limit) {
      p.target.limit = *rule.target_limit;
    } else {
      if (!problem.truth.attained) throw config::ParseError("rule.target_limit", "required when s* is not attained");
      p.target.limit = problem.truth.s_star + rule.target_offset;
    }
    p.target.excess = rule.target_excess;
    p.target.excess_power = rule.target_excess_power;
    return p;
  }
  throw config::ParseError("rule.type", "'" + rule.type + "' has no direct stepsize");
}

struct RunOutcome {
  int exit_code = kOk;
  RunTrace trace;
  std::vector<cert::CertificateReport> reports;
  std::optional<double> s_star;
  double dist0 = 0.0;
  fs::path directory;
  std::string csv;
};

inline void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

/// Executes one configured experiment and writes trace.csv, truth.json and report.txt under `directory`.
/// Throws config::ParseError and ContractViolation; the caller maps them to exit codes.
inline RunOutcome execute(const config::ExperimentConfig& cfg, const fs::path& directory, std::ostream& log) {
  const ProblemInstance problem = config::build_problem(cfg.problem, cfg.problem_params);
  const Point x0 = start_point(cfg.run, problem);
  const RunOptions options{cfg.run.max_iters, cfg.run.stop_tol, cfg.run.record_every};

  RunOutcome out;
  out.directory = directory;
  if (problem.truth.attained) {
    out.s_star = problem.truth.s_star;
    out.dist0 = (x0 - problem.truth.minimizer).norm();
  }
  CheckPlan plan;
  plan.checks = cfg.certificates.checks;
  plan.probes = cfg.certificates.probes;
  plan.seed = cfg.run.seed;
  plan.growth_factor = cfg.certificates.growth_factor;
  plan.tail_fraction = cfg.certificates.tail_fraction;
  plan.target_tolerance = cfg.certificates.target_tolerance;
  plan.gap_threshold = cfg.certificates.gap_threshold;

  if (cfg.rule.type == "constant_optimal") {
    if (!problem.truth.attained) throw config::ParseError("rule.type", "constant_optimal needs an attained optimum");
    if (!(out.dist0 > 0.0)) throw config::ParseError("run.x0", "constant_optimal needs x0 away from the witness");
    if (cfg.run.stop_tol > 0.0) throw config::ParseError("run.stop_tol", "constant_optimal runs to the full horizon");
    const std::size_t horizon = cfg.run.max_iters - 1;
    auto cal = cert::calibrate_constant_alpha(problem.f, problem.g, x0, out.dist0, horizon, cfg.rule.pilot_rounds,
                                              cfg.run.record_every, problem.name);
    log << "calibration: alpha=" << io::fmt(cal.alpha) << " C_K=" << io::fmt(cal.c_k) << " rounds=" << cal.rounds
        << (cal.converged ? "" : " (not converged)") << '\n';
    if (cfg.rule.alpha_factor != 1.0) {
      out.trace = run(problem.f, problem.g, ConstantStep{cal.alpha * cfg.rule.alpha_factor}, x0, options, problem.name);
    } else {
      out.trace = std::move(cal.trace);
    }
    plan.expect_optimal_alpha = true;
  } else {
    out.trace = run(problem.f, problem.g, resolve_rule(cfg.rule, problem), x0, options, problem.name);
  }

  RunTrace checked = out.trace;
  std::string corruption;
  if (const auto& c = cfg.certificates.corrupt) {
    if (c->kind == "scale_alpha") checked = corrupt::scale_alpha(std::move(checked), c->amount);
    if (c->kind == "shift_values") checked = corrupt::shift_values(std::move(checked), c->amount);
    if (c->kind == "perturb_point") {
      try {
        checked = corrupt::perturb_point(std::move(checked), c->k, c->amount);
      } catch (const ConfigError& e) {
        throw config::ParseError("certificates.corrupt.k", e.what());
      }
    }
    if (c->kind == "understate_rho") plan.rho_override = c->amount;
    corruption = c->kind + "(" + io::fmt(c->amount) + ")";
  }
  out.reports = evaluate(checked, problem, plan);

  std::ostringstream csv;
  io::write_trace_csv(csv, out.trace, cfg.output.points);
  out.csv = csv.str();
  write_file(directory / "trace.csv", out.csv);
  write_file(directory / "truth.json", io::run_metadata(out.trace, problem, cfg.problem_params).dump(2) + "\n");

  std::vector<std::pair<std::string, std::string>> header{
      {"run.problem", problem.name},
      {"run.rule", rule_name(out.trace.rule)},
      {"run.iterations", std::to_string(out.trace.records.size())},
      {"run.stop_reason", to_string(out.trace.stop_reason)},
      {"run.final_value", io::fmt(out.trace.final_value)},
      {"run.final_best", io::fmt(out.trace.final_best)},
      {"constants.zeta", io::fmt(problem.constants.zeta)},
      {"constants.rho", io::fmt(problem.constants.rho)},
      {"constants.empirical_zeta", io::fmt(cert::empirical_zeta(out.trace))},
  };
  if (out.s_star) {
    header.emplace_back("truth.s_star", io::fmt(*out.s_star));
    header.emplace_back("truth.dist0", io::fmt(out.dist0));
    header.emplace_back("truth.dist0_mode", "upper_bound");
  }
  if (!corruption.empty()) header.emplace_back("certificates.corrupt", corruption);
  std::ostringstream report;
  io::write_report(report, header, out.reports);
  write_file(directory / "report.txt", report.str());

  log << problem.name << " / " << rule_name(out.trace.rule) << ": " << out.trace.records.size() << " iterations, "
      << to_string(out.trace.stop_reason) << ", best " << io::fmt(out.trace.final_best) << '\n';
  for (const auto& r : out.reports) log << io::summary_line(r) << '\n';
  out.exit_code = all_hold(out.reports) ? kOk : kCertificateFailure;
  return out;
}

/// Runs `body`, mapping parse errors to 2 and contract violations to 3 with a message on `err`.
template <class Body>
int guarded(Body&& body, std::ostream& err) {
  try {
    return body();
  } catch (const config::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const ContractViolation& e) {
    err << "contract violation at iteration " << e.iteration() << ": " << e.what() << '\n';
    return kContractViolation;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }
}

inline int run_experiment(const std::string& config_path, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        const auto cfg = config::load(config_path);
        return execute(cfg, output_root() / cfg.output.dir, log).exit_code;
      },
      err);
}

struct SweepRow {
  double value = 0.0;
  std::size_t iterations = 0;
  double final_best = 0.0;
  std::optional<double> gap;
  std::optional<double> bound;
  bool holds = false;
  std::size_t rank = 0;
};

/// One sub-run per value of the scalar at `param`, executed concurrently; writes sweep.csv (trace rows
/// prefixed by sweep_value) and sweep_summary.csv ranking final best-value gaps against the
/// best-value bound at the horizon.
inline int sweep(const std::string& config_path, const std::string& param, const std::vector<double>& values,
                 std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        if (values.empty()) throw config::ParseError("--values", "at least one value required");
        const auto base = config::load(config_path);
        std::vector<config::ExperimentConfig> configs;
        for (double v : values) configs.push_back(config::from_json(config::with_scalar(base.document, param, v)));
        const fs::path root = output_root() / base.output.dir;

        std::vector<std::future<std::pair<RunOutcome, std::string>>> jobs;
        for (std::size_t i = 0; i < configs.size(); ++i) {
          jobs.push_back(std::async(std::launch::async, [&, i] {
            std::ostringstream sub_log;
            RunOutcome o = execute(configs[i], root / ("sweep_" + std::to_string(i)), sub_log);
            return std::make_pair(std::move(o), sub_log.str());
          }));
        }
        std::vector<RunOutcome> outcomes;
        std::exception_ptr failure;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          try {
            auto [o, text] = jobs[i].get();
            log << "[" << param << "=" << io::fmt(values[i]) << "]\n" << text;
            outcomes.push_back(std::move(o));
          } catch (...) {
            if (!failure) failure = std::current_exception();
          }
        }
        if (failure) std::rethrow_exception(failure);

        std::ostringstream combined;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
          std::istringstream rows(outcomes[i].csv);
          std::string line;
          std::getline(rows, line);
          if (i == 0) combined << "sweep_value," << line << '\n';
          while (std::getline(rows, line)) combined << io::fmt(values[i]) << ',' << line << '\n';
        }
        write_file(root / "sweep.csv", combined.str());

        std::vector<SweepRow> table;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
          const auto& o = outcomes[i];
          SweepRow row{values[i], o.trace.records.size(), o.trace.final_best, {}, {}, all_hold(o.reports), 0};
          if (o.s_star && !o.trace.records.empty()) {
            row.gap = o.trace.final_best - *o.s_star;
            const auto sums = cert::running_sums(o.trace);
            row.bound = (o.dist0 * o.dist0 + sums.c.back() * sums.alpha_sq_sum.back()) / (2.0 * sums.alpha_sum.back());
          }
          table.push_back(row);
        }
        std::vector<std::size_t> order(table.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return table[a].gap.value_or(table[a].final_best) < table[b].gap.value_or(table[b].final_best);
        });
        for (std::size_t r = 0; r < order.size(); ++r) table[order[r]].rank = r + 1;

        std::ostringstream summary;
        summary << "sweep_value,iterations,final_best,gap,bound,gap_over_bound,rank,all_hold\n";
        log << "\nsweep " << param << ":\n";
        for (const auto& row : table) {
          const std::string gap = row.gap ? io::fmt(*row.gap) : "";
          const std::string bound = row.bound ? io::fmt(*row.bound) : "";
          const std::string ratio = (row.gap && row.bound && *row.bound > 0.0) ? io::fmt(*row.gap / *row.bound) : "";
          summary << io::fmt(row.value) << ',' << row.iterations << ',' << io::fmt(row.final_best) << ',' << gap << ','
                  << bound << ',' << ratio << ',' << row.rank << ',' << (row.holds ? "true" : "false") << '\n';
          log << "  " << param << "=" << io::fmt(row.value) << " rank=" << row.rank << " gap=" << gap
              << " bound=" << bound << (row.holds ? " PASS" : " FAIL") << '\n';
        }
        write_file(root / "sweep_summary.csv", summary.str());
        const bool ok = std::all_of(table.begin(), table.end(), [](const SweepRow& r) { return r.holds; });
        return ok ? kOk : kCertificateFailure;
      },
      err);
}

/// Re-certifies a written trace from its CSV and truth.json metadata.
inline int check(const std::string& trace_path, const std::string& truth_path, std::ostream& log = std::cout,
                 std::ostream& err = std::cerr) {
  return guarded(
      [&] {
        const auto meta = config::read_json_file(truth_path);
        ProblemInstance problem = [&] {
          try {
            return config::build_problem(meta.at("problem").at("name").get<std::string>(),
                                         meta.at("problem").at("params"));
          } catch (const Json::exception& e) {
            throw config::ParseError("problem", e.what());
          }
        }();
        std::ifstream in(trace_path);
        if (!in) throw config::ParseError("", "cannot open '" + trace_path + "'");
        bool exact_uw = false;
        RunTrace trace;
        try {
          trace = io::trace_from(io::read_trace_csv(in, problem.dim, &exact_uw), meta);
        } catch (const Json::exception& e) {
          throw config::ParseError("", truth_path + ": " + e.what());
        }
        const auto reports = evaluate(trace, problem, CheckPlan{});
        if (!exact_uw) log << "note: ||u+w|| bounded by ||u||+||w|| (no point columns)\n";
        for (const auto& r : reports) log << io::summary_line(r) << '\n';
        return all_hold(reports) ? kOk : kCertificateFailure;
      },
      err);
}

inline int list_problems(std::ostream& log = std::cout) {
  const std::vector<std::pair<std::string, std::string>> blurbs{
      {"lad_l1", "min ||Ax - b||_1 + lambda ||x||_1; params A,b or rows,cols,seed; lambda"},
      {"constrained_max_affine", "min max_i (<a_i,x> + b_i) over a set; params A, b, set"},
      {"sum_of_distances", "min sum_i dist(x, C_i) over an optional g_set; params sets, g_set (dim <= 2)"},
      {"dual_finite", "min max_j [-h0_j - <x, H_j>] over x >= 0 (+ lambda g0); params h0, H, lambda, g0"},
      {"unattained_inf", "tangent envelope of sqrt(x^2+1) - x: infimum 0, not attained"},
  };
  for (const auto& [name, text] : blurbs) log << name << "  " << text << '\n';
  return kOk;
}

}  // namespace pss::harness
