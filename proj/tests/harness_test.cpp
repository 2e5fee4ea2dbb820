#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pss/harness.hpp"

namespace {

namespace fs = std::filesystem;
namespace harness = pss::harness;
namespace config = pss::config;

const fs::path kSource = PSS_SOURCE_DIR;

std::string config_path(const std::string& name) { return (kSource / "configs" / (name + ".json")).string(); }
std::string fixture_path(const std::string& name) { return (kSource / "tests" / "fixtures" / (name + ".json")).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("pss_harness_test_" + std::to_string(::getpid())) / info->name();
    fs::remove_all(root_);
    fs::create_directories(root_);
    ::setenv(harness::kOutputRootVariable, root_.c_str(), 1);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(const std::string& path) { return harness::run_experiment(path, log_, err_); }

  fs::path root_;
  std::ostringstream log_, err_;
};

TEST_F(HarnessTest, OutputRootFollowsTheEnvironment) { EXPECT_EQ(harness::output_root(), root_); }

TEST_F(HarnessTest, NegativeLambdaNamesTheField) {
  EXPECT_EQ(run(fixture_path("negative_lambda")), harness::kParseError);
  EXPECT_NE(err_.str().find("field 'problem.params.lambda'"), std::string::npos) << err_.str();
}

TEST_F(HarnessTest, UnknownKeyNamesTheField) {
  EXPECT_EQ(run(fixture_path("unknown_key")), harness::kParseError);
  EXPECT_NE(err_.str().find("rule.powr"), std::string::npos) << err_.str();
}

TEST_F(HarnessTest, InfeasibleStartIsAContractViolation) {
  EXPECT_EQ(run(fixture_path("infeasible_start")), harness::kContractViolation);
  EXPECT_NE(err_.str().find("iteration 0"), std::string::npos) << err_.str();
}

TEST_F(HarnessTest, MissingFileIsAParseError) {
  EXPECT_EQ(run((root_ / "nope.json").string()), harness::kParseError);
}

TEST_F(HarnessTest, MalformedJsonIsAParseError) {
  std::ofstream(root_ / "bad.json") << "{\"schema_version\": 1,";
  EXPECT_EQ(run((root_ / "bad.json").string()), harness::kParseError);
}

TEST_F(HarnessTest, ConfigFieldErrors) {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      config::from_json(config::Json::parse(text));
      ADD_FAILURE() << "accepted: " << text;
    } catch (const config::ParseError& e) {
      EXPECT_NE(std::string(e.what()).find("'" + field + "'"), std::string::npos) << e.what();
    }
  };
  const std::string head = R"({"schema_version": 1, "problem": {"name": "unattained_inf"}, )";
  expect_field(R"({"schema_version": 2, "problem": {"name": "unattained_inf"}, "rule": {"type": "exogenous"}})",
               "schema_version");
  expect_field(head + R"("rule": {"type": "exogenous", "power": 0.4}})", "rule.power");
  expect_field(head + R"("rule": {"type": "sideways"}})", "rule.type");
  expect_field(head + R"("rule": {"type": "exogenous"}, "run": {"max_iters": 0}})", "run.max_iters");
  expect_field(head + R"("rule": {"type": "polyak", "gamma": 2.5, "target_limit": 0}})", "rule.gamma");
  expect_field(head + R"("rule": {"type": "exogenous"}, "certificates": {"checks": ["nonsense"]}})",
               "certificates.checks[0]");
  expect_field(head + R"("rule": {"type": "exogenous"}, "extra": 1})", "extra");
}

TEST_F(HarnessTest, ConfigRoundTripsThroughItsDocument) {
  const auto cfg = config::load(config_path("lad_l1_polyak"));
  EXPECT_EQ(cfg.problem, "lad_l1");
  EXPECT_EQ(cfg.rule.type, "polyak");
  EXPECT_EQ(cfg.run.max_iters, 2000u);
  EXPECT_TRUE(cfg.output.points);
  const auto again = config::from_json(cfg.document);
  EXPECT_EQ(again.document, cfg.document);
}

TEST_F(HarnessTest, GoldenTraceForTheConstantStepConfig) {
  EXPECT_EQ(run(config_path("lad_l1_constant")), harness::kOk) << log_.str();
  EXPECT_EQ(slurp(root_ / "lad_l1_constant" / "trace.csv"), slurp(kSource / "tests" / "golden" / "lad_l1_constant.csv"));
}

TEST_F(HarnessTest, RunWritesTheThreeArtifacts) {
  ASSERT_EQ(run(config_path("lad_l1_polyak")), harness::kOk) << log_.str();
  const fs::path dir = root_ / "lad_l1_polyak";
  for (const char* f : {"trace.csv", "truth.json", "report.txt"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream report(dir / "report.txt");
  const auto entries = pss::io::read_report(report);
  bool all_hold = false;
  for (const auto& [k, v] : entries) {
    if (k == "summary.all_hold") all_hold = v == "true";
  }
  EXPECT_TRUE(all_hold);
  const auto truth = config::read_json_file((dir / "truth.json").string());
  EXPECT_EQ(truth.at("problem").at("name"), "lad_l1");
}

TEST_F(HarnessTest, ExitCodesOfBundledNegativeControls) {
  EXPECT_EQ(run(config_path("negative_scaled_alpha")), harness::kCertificateFailure);
  EXPECT_EQ(run(config_path("negative_alpha_10x")), harness::kCertificateFailure);
  EXPECT_NE(log_.str().find("FAIL"), std::string::npos);
}

TEST_F(HarnessTest, RepeatedRunsAreByteIdentical) {
  for (const char* name : {"lad_l1_exogenous", "max_affine_ball"}) {
    ASSERT_EQ(run(config_path(name)), harness::kOk) << log_.str();
    const auto first_csv = slurp(root_ / name / "trace.csv");
    const auto first_report = slurp(root_ / name / "report.txt");
    ASSERT_EQ(run(config_path(name)), harness::kOk);
    EXPECT_EQ(slurp(root_ / name / "trace.csv"), first_csv) << name;
    EXPECT_EQ(slurp(root_ / name / "report.txt"), first_report) << name;
  }
}

TEST_F(HarnessTest, SingleValueSweepEqualsARun) {
  ASSERT_EQ(run(config_path("lad_l1_exogenous")), harness::kOk);
  ASSERT_EQ(harness::sweep(config_path("lad_l1_exogenous"), "rule.power", {0.51}, log_, err_), harness::kOk)
      << err_.str();
  const fs::path dir = root_ / "lad_l1_exogenous";
  EXPECT_EQ(slurp(dir / "sweep_0" / "trace.csv"), slurp(dir / "trace.csv"));
  EXPECT_EQ(slurp(dir / "sweep_0" / "report.txt"), slurp(dir / "report.txt"));
}

TEST_F(HarnessTest, PowerSweepWritesARankedSummary) {
  ASSERT_EQ(harness::sweep(config_path("lad_l1_exogenous"), "rule.power", {0.55, 0.75, 1.0}, log_, err_),
            harness::kOk)
      << err_.str();
  const fs::path dir = root_ / "lad_l1_exogenous";
  std::ifstream in(dir / "sweep_summary.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_NE(line.find("rank"), std::string::npos) << line;
  int rows = 0;
  while (std::getline(in, line)) rows += line.empty() ? 0 : 1;
  EXPECT_EQ(rows, 3);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir / ("sweep_" + std::to_string(i)) / "report.txt"));
  EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
}

TEST_F(HarnessTest, PolyakGammaSweepHolds) {
  EXPECT_EQ(harness::sweep(config_path("lad_l1_polyak"), "rule.gamma", {0.1, 1.0, 1.9}, log_, err_), harness::kOk)
      << err_.str() << log_.str();
}

TEST_F(HarnessTest, SweepRejectsNonScalarParameters) {
  EXPECT_EQ(harness::sweep(config_path("lad_l1_exogenous"), "problem.params", {1.0}, log_, err_),
            harness::kParseError);
  EXPECT_NE(err_.str().find("not a scalar parameter"), std::string::npos) << err_.str();
  EXPECT_EQ(harness::sweep(config_path("lad_l1_exogenous"), "rule.missing", {1.0}, log_, err_), harness::kParseError);
}

TEST_F(HarnessTest, CheckRecertifiesWrittenTraces) {
  for (const char* name : {"lad_l1_polyak", "lad_l1_exogenous", "dual_finite"}) {
    ASSERT_EQ(run(config_path(name)), harness::kOk) << name;
    const fs::path dir = root_ / name;
    EXPECT_EQ(harness::check((dir / "trace.csv").string(), (dir / "truth.json").string(), log_, err_), harness::kOk)
        << name << "\n" << log_.str() << err_.str();
  }
}

TEST_F(HarnessTest, CheckCatchesATamperedTrace) {
  ASSERT_EQ(run(config_path("lad_l1_polyak")), harness::kOk);
  const fs::path dir = root_ / "lad_l1_polyak";
  std::ifstream in(dir / "trace.csv");
  std::ostringstream out;
  std::string line;
  std::getline(in, line);
  out << line << '\n';
  std::size_t row = 0;
  while (std::getline(in, line)) {
    auto cells = pss::io::split(line);
    if (row++ == 20) cells[2] = "1e6";  // best value no longer the running minimum
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
  std::ofstream(dir / "tampered.csv") << out.str();
  EXPECT_EQ(harness::check((dir / "tampered.csv").string(), (dir / "truth.json").string(), log_, err_),
            harness::kCertificateFailure);
}

TEST_F(HarnessTest, CsvRoundTripIsExact) {
  const auto p = pss::gallery::make_lad_l1_random(8, 3, 0.2, 5);
  const auto t = pss::run(p.f, p.g, pss::ExogenousStep{1.0, 0.6}, p.default_x0, {200, 0.0, 3}, p.name);
  std::stringstream buffer;
  pss::io::write_trace_csv(buffer, t, true);
  bool exact = false;
  const auto back = pss::io::read_trace_csv(buffer, p.dim, &exact);
  EXPECT_TRUE(exact);
  ASSERT_EQ(back.size(), t.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    const auto& a = t.records[k];
    const auto& b = back[k];
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.best_value, b.best_value);
    EXPECT_EQ(a.ergodic_value, b.ergodic_value);
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.step_norm, b.step_norm);
    ASSERT_EQ(a.x.has_value(), b.x.has_value()) << k;
    if (a.x) {
      EXPECT_EQ(*a.x, *b.x);
      EXPECT_EQ(*a.u, *b.u);
      EXPECT_EQ(*a.w, *b.w);
      EXPECT_EQ(a.uw_norm, b.uw_norm);
    }
  }
}

TEST_F(HarnessTest, NonFiniteCellsAreSpelledOut) {
  EXPECT_EQ(pss::io::fmt(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(pss::io::fmt(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(pss::io::fmt(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_TRUE(std::isinf(pss::io::parse_double("-inf")));
  EXPECT_TRUE(std::isnan(pss::io::parse_double("nan")));
}

TEST_F(HarnessTest, ListsEveryProblem) {
  EXPECT_EQ(harness::list_problems(log_), harness::kOk);
  for (const auto& name : pss::gallery::problem_names()) EXPECT_NE(log_.str().find(name), std::string::npos) << name;
}

}  // namespace
