#include <gtest/gtest.h>

#include "qlwave/config.hpp"
#include "qlwave/output.hpp"
#include "qlwave/pipeline.hpp"

using namespace qlwave;

namespace {

int error_line(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_message(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesRunDocument) {
  const auto c = parse_run_config(R"(
scenario:
  equation: semilinear
  epsilon: 0.5
  dr: 0.0125
  t_end: 50
eikonal:
  enabled: false
diagnostics:
  fits: [phi]
output:
  dir: somewhere
)");
  EXPECT_EQ(c.scenario.equation, EquationKind::Semilinear);
  EXPECT_EQ(c.scenario.epsilon, 0.5);
  EXPECT_EQ(c.scenario.dr, 0.0125);
  EXPECT_FALSE(c.eikonal.enabled);
  ASSERT_EQ(c.diagnostics.fits.size(), 1u);
  EXPECT_EQ(c.diagnostics.fits[0], DecayQuantity::Phi);
  EXPECT_EQ(c.out_dir, "somewhere");
}

TEST(Config, UnknownKeysCarryTheirLine) {
  EXPECT_EQ(error_line("scenario:\n  epsilon: 0.1\n  colour: red\n"), 3);
  EXPECT_EQ(error_line("scenario:\n  epsilon: 0.1\nextra: 1\n"), 3);
}

TEST(Config, InvalidValuesNameTheField) {
  const std::string msg = error_message("scenario:\n  epsilon: 0.1\n  dr: -0.02\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dr"), std::string::npos) << msg;
  EXPECT_GT(error_line("scenario:\n  equation: cubic\n"), 0);
  EXPECT_GT(error_line("scenario:\n  epsilon: abc\n"), 0);
  EXPECT_GT(error_line("scenario: [1, 2\n"), 0);
}

TEST(Config, InequalityRequirements) {
  EXPECT_GT(error_line("eikonal:\n  enabled: false\ndiagnostics:\n  inequalities: [energy]\n"), 0);
  EXPECT_GT(error_line("diagnostics:\n  inequalities: [hormander]\n"), 0);
  EXPECT_GT(error_line("diagnostics:\n  inequalities: [sobolev]\n"), 0);
}

TEST(Config, SweepEpsilons) {
  const auto s = parse_sweep_config("scenario:\n  t_end: 5\nsweep:\n  epsilons: [0.02, 0.01]\n  parallel: 2\n");
  EXPECT_EQ(s.epsilons, (std::vector<double>{0.02, 0.01}));
  EXPECT_EQ(s.parallel, 2);
  EXPECT_THROW(parse_sweep_config("sweep:\n  epsilons: []\n"), ConfigError);
  EXPECT_THROW(parse_sweep_config("sweep:\n  epsilons: [0.1, 0.1]\n"), ConfigError);
  EXPECT_THROW(parse_sweep_config("sweep:\n  epsilons: [0.1, -0.1]\n"), ConfigError);
}

TEST(Pipeline, ExitCodesFollowTermination) {
  RunConfig c;
  c.scenario.c1 = 0;
  c.scenario.t_end = 3;
  c.eikonal.enabled = false;
  c.diagnostics.fits.clear();
  EXPECT_EQ(run_pipeline(c).exit_code(), 0);

  c.scenario.equation = EquationKind::Semilinear;
  c.scenario.epsilon = 0.8;
  c.scenario.dr = 0.0125;
  c.scenario.t_end = 30;
  const auto r = run_pipeline(c);
  EXPECT_EQ(r.exit_code(), 2);
  const auto row = summary_row(r);
  EXPECT_TRUE(row.blowup);
  EXPECT_TRUE(std::isfinite(row.t_star));
}

TEST(Pipeline, LinearGrowthExponentNearZero) {
  RunConfig c;
  c.scenario.c1 = 0;
  c.scenario.t_end = 60;
  c.eikonal.enabled = false;
  const auto r = run_pipeline(c);
  ASSERT_TRUE(r.growth.has_value());
  EXPECT_LE(std::abs(r.growth->gamma), 0.05);
}

TEST(Output, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) EXPECT_EQ(std::stod(format_number(x)), x);
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(NAN), "nan");
}

TEST(Output, SummaryJsonRoundTrip) {
  SummaryRow r;
  r.epsilon = 0.01;
  r.equation = "model";
  r.termination = "Completed";
  r.gamma = 0.0038;
  r.steps = 1234;
  const auto back = summary_from_json(to_json(r));
  EXPECT_EQ(summary_csv_line(back), summary_csv_line(r));
  EXPECT_EQ(summary_header().size(), 17u);
}
