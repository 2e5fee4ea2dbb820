#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pss/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Proximal subgradient splitting experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment and certify it");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::string sweep_config, param;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a scalar parameter");
  sweep->add_option("config", sweep_config, "Experiment config (JSON)")->required();
  sweep->add_option("--param", param, "Dotted path of the scalar, e.g. rule.power")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  std::string trace_path, truth_path;
  auto* check = app.add_subcommand("check", "Re-certify a written trace");
  check->add_option("trace", trace_path, "trace.csv")->required();
  check->add_option("truth", truth_path, "truth.json written next to it")->required();

  auto* list = app.add_subcommand("list-problems", "List gallery problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pss::harness::kParseError;
  }

  if (*run) return pss::harness::run_experiment(config_path);
  if (*sweep) return pss::harness::sweep(sweep_config, param, values);
  if (*check) return pss::harness::check(trace_path, truth_path);
  if (*list) return pss::harness::list_problems();
  return pss::harness::kParseError;
}
