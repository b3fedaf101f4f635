#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pbox/cli.hpp"
#include "pbox/error.hpp"

using namespace pbox::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "pbox");
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("pbox_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double value_of(const std::string& csv, const std::string& id) {
  for (const auto& l : lines(csv)) {
    const auto f = fields(l);
    if (f[0] == id) return std::stod(f[2]);
  }
  ADD_FAILURE() << "no row " << id;
  return 0.0;
}

const std::string kScenarios = PBOX_SCENARIO_DIR;

}  // namespace

TEST(CliBuiltin, Oscillator) {
  const auto r = run({"paper", "oscillator"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows.front(), kCsvHeader);
  EXPECT_NEAR(value_of(r.out, "E_lower(zeta)"), 0.584, 0.002);
  EXPECT_NEAR(value_of(r.out, "E_upper(zeta)"), 1.664, 0.002);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(std::stod(fields(rows[i])[3]), 0.002);
}

TEST(CliBuiltin, Dike) {
  const auto r = run({"paper", "dike"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_of(r.out, "E_lower(h)"), 1.515, 0.01);
  EXPECT_NEAR(value_of(r.out, "E_upper(h)"), 6.423, 0.01);
  EXPECT_NEAR(value_of(r.out, "threshold(0.01)"), 10.725, 0.01);
  EXPECT_EQ(r.out.find('*'), std::string::npos);
}

TEST(CliBuiltin, ExamplesRun) {
  for (const auto& name : builtin_names()) {
    const auto r = run({"paper", name, "--no-timing"});
    EXPECT_EQ(r.code, 0) << name << ": " << r.err;
  }
  const auto r = run({"paper", "example_frechet_62"});
  EXPECT_DOUBLE_EQ(value_of(r.out, "P_lower(A)"), 0.4);
  EXPECT_DOUBLE_EQ(value_of(r.out, "P_lower(B)"), 0.7);
  EXPECT_DOUBLE_EQ(value_of(r.out, "P_lower(A|B)"), 0.7);
  EXPECT_DOUBLE_EQ(value_of(r.out, "P_lower(A&B)"), 0.1);
  EXPECT_EQ(run({"paper", "no_such_case"}).code, 3);
}

TEST(CliInfer, EmptyQueriesGiveHeaderOnly) {
  const auto r = run({"infer", kScenarios + "/empty.json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, std::string(kCsvHeader) + "\n");
}

TEST(CliInfer, ScenarioFiles) {
  for (const char* f : {"oscillator.json", "dike.json", "finite_ordering.json", "continuum_knots.json",
                        "product_frechet.json", "arithmetic.json"}) {
    const auto r = run({"infer", kScenarios + "/" + f, "--no-timing"});
    EXPECT_EQ(r.code, 0) << f << ": " << r.err;
    for (const auto& l : lines(r.out)) EXPECT_EQ(fields(l).size(), 5u) << l;
  }
  const auto r = run({"infer", kScenarios + "/continuum_knots.json"});
  EXPECT_DOUBLE_EQ(value_of(r.out, "field(0.5,0.6]"), 0.0);
  EXPECT_NEAR(value_of(r.out, "t(0.25)"), 1.75, 1e-9);
}

TEST(CliInfer, Deterministic) {
  const auto a = run({"infer", kScenarios + "/continuum_knots.json", "--no-timing"});
  const auto b = run({"infer", kScenarios + "/continuum_knots.json", "--no-timing"});
  EXPECT_EQ(a.out, b.out);
}

TEST(CliInfer, ParseErrorReportsPosition) {
  const auto path = write_temp("syntax.json", "{\n  \"queries\": [\n    {\"kind\": \"event_lower\",, }\n  ]\n}\n");
  const auto r = run({"infer", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column"), std::string::npos);
  try {
    parse_scenario("{\n  \"queries\": [\n    {\"kind\": \"event_lower\",, }\n  ]\n}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(CliInfer, SchemaErrorsExitTwo) {
  const auto path = write_temp("schema.json", R"({"queries": [], "bogus": 1})");
  EXPECT_EQ(run({"infer", path}).code, 2);
  const auto missing = write_temp("missing.json", R"({"name": "x"})");
  EXPECT_EQ(run({"infer", missing}).code, 2);
  const auto kind = write_temp("kind.json", R"({"pbox": {"builtin": "oscillator"}, "queries": [{"kind": "median"}]})");
  EXPECT_EQ(run({"infer", kind}).code, 2);
}

TEST(CliInfer, ValidationErrorExitsThree) {
  const auto path = write_temp("invalid.json", R"({
    "space": {"type": "finite", "labels": ["a", "b"]},
    "pbox": {"lower": [0.6, 1.0], "upper": [0.4, 1.0]},
    "queries": []
  })");
  const auto r = run({"infer", path});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("validation error"), std::string::npos);
  const auto unknown = write_temp("unknown_osc.json", R"({
    "pbox": {"builtin": "oscillator"},
    "queries": [{"kind": "expectation_lower", "oscillation": "nope"}]
  })");
  EXPECT_EQ(run({"infer", unknown}).code, 3);
}

TEST(CliInfer, MissingFileIsParseError) {
  const auto r = run({"infer", "/nonexistent/scenario.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/scenario.json"), std::string::npos);
}

TEST(CliInfer, ToleranceMissIsFlagged) {
  const auto r = run({"infer", kScenarios + "/oscillator.json", "--tol", "1e-12", "--max-refine", "2"});
  EXPECT_EQ(r.code, 0);
  bool flagged = false;
  for (const auto& l : lines(r.out)) flagged = flagged || fields(l)[3].back() == '*';
  EXPECT_TRUE(flagged);
}

TEST(CliVerify, Outcomes) {
  auto r = run({"verify", "--trials", "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("instances=0"), std::string::npos);
  r = run({"verify", "--trials", "40", "--inject-fault"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("subset {"), std::string::npos);
  r = run({"verify", "--trials", "30", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(CliTable, OscillatorCdfGrid11) {
  const auto r = run({"table", "oscillator", "--what", "cdf", "--grid", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], "z,lower,upper");
  const auto mid = fields(rows[6]);
  EXPECT_DOUBLE_EQ(std::stod(mid[0]), 0.5);
  EXPECT_DOUBLE_EQ(std::stod(mid[1]), 0.25);
}

TEST(CliTable, GridTwoIsEndpoints) {
  const auto r = run({"table", "oscillator", "--what", "cdf", "--grid", "2"});
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(std::stod(fields(rows[1])[0]), 0.0);
  const auto top = fields(rows[2]);
  EXPECT_EQ(std::stod(top[0]), 1.0);
  EXPECT_EQ(std::stod(top[1]), 1.0);
  EXPECT_EQ(std::stod(top[2]), 1.0);
}

TEST(CliTable, DikeIntegrandDecaysBefore25) {
  const auto r = run({"table", "dike", "--what", "integrand", "--grid", "101", "--t-max", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "t,lower_cut,upper_cut");
  double crossed = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    if (std::stod(f[2]) < 1e-6) {
      crossed = std::stod(f[0]);
      break;
    }
  }
  EXPECT_GE(crossed, 0.0);
  EXPECT_LT(crossed, 25.0);
}

TEST(CliTable, FiniteCdfUsesClasses) {
  const auto r = run({"table", kScenarios + "/finite_ordering.json", "--what", "cdf"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "class,lower,upper");
  EXPECT_EQ(rows.size(), 4u);
}

TEST(CliUsage, BadArguments) {
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"table", "oscillator", "--what", "pdf"}).code, 0);
}
