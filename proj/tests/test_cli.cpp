#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "heisqi/cli.hpp"
#include "test_util.hpp"

using heisqi::json;
using heisqi::testing::samples_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = heisqi::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_spec(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, ReportShapeAndByteIdenticalReruns) {
  const std::vector<std::vector<std::string>> invocations = {
      {"validate", samples_path("conjugate123.json")},
      {"classify", samples_path("diag123.json"), samples_path("diag246.json")},
      {"isometry", "--pairs", "500", samples_path("diag123.json"), samples_path("conjugate123.json")},
      {"dist", samples_path("diag123.json"), "-1,0,0", "1,1,0"},
      {"--seed", "3", "chain", "--samples", "200", samples_path("diag112.json"), "0,0,0", "1,0,0"},
      {"regularity", "--samples", "20000", samples_path("diag123.json")},
      {"cosets", samples_path("diag123.json"), "0,0,0", "0,0,0.7"},
      {"distort", "--samples", "100", "--pairs", "200", samples_path("diag123.json")},
      {"distort", "--samples", "100", "--pairs", "200", samples_path("diag123.json"), samples_path("diag246.json")},
  };
  for (const auto& args : invocations) {
    const Outcome a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << args[0] << "\n" << a.err;
    EXPECT_EQ(a.out, b.out) << args[0];
    EXPECT_TRUE(a.err.empty());
    const json r = json::parse(a.out);
    for (const char* key : {"results", "command", "inputs", "seed", "tool_version"}) EXPECT_TRUE(r.contains(key)) << key;
    EXPECT_FALSE(r.contains("wall_time_ms"));
    EXPECT_EQ(r["tool_version"], heisqi::cli::kToolVersion);
  }
}

TEST(Cli, ResultsMatchLibrary) {
  const json c = json::parse(run({"classify", samples_path("diag123.json"), samples_path("diag246.json")}).out);
  EXPECT_TRUE(c["results"]["equivalent"].get<bool>());
  EXPECT_DOUBLE_EQ(c["results"]["lambda"].get<double>(), 0.5);
  const json n = json::parse(run({"classify", samples_path("diag123.json"), samples_path("diag134.json")}).out);
  EXPECT_FALSE(n["results"]["equivalent"].get<bool>());
  EXPECT_TRUE(n["results"]["lambda"].is_null());
  const json d = json::parse(run({"dist", samples_path("diag123.json"), "1,0,0", "1,1,0"}).out);
  EXPECT_NEAR(d["results"]["dist"].get<double>(), 1.7937005259840997, 1e-15);
  const json s = json::parse(run({"--seed", "7", "validate", samples_path("spectral123.json")}).out);
  EXPECT_EQ(s["seed"].get<int>(), 7);
  EXPECT_TRUE(s["results"]["all_passed"].get<bool>());
}

TEST(Cli, TimingIsOptIn) {
  const Outcome o = run({"--timing", "validate", samples_path("diag123.json")});
  ASSERT_EQ(o.code, 0);
  EXPECT_TRUE(json::parse(o.out).contains("wall_time_ms"));
}

TEST(Cli, UsageErrorsExitOne) {
  const Outcome bogus = run({"bogus"});
  EXPECT_EQ(bogus.code, 1);
  EXPECT_NE(bogus.err.find("unknown subcommand: bogus"), std::string::npos);
  EXPECT_TRUE(bogus.out.empty());
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"validate", "--seed", "x", samples_path("diag123.json")}).code, 1);
  const Outcome arity = run({"dist", samples_path("diag123.json"), "0,0,0"});
  EXPECT_EQ(arity.code, 1);
  EXPECT_EQ(json::parse(arity.err)["error"]["field"], "arguments");
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SchemaErrorsNameTheField) {
  struct Case {
    const char* text;
    const char* kind;
    const char* field;
  };
  const std::vector<Case> cases = {
      {R"({"derivation": {"matrix": [[1,0,0],[0,2,0],[0,0,3]]}})", "SchemaError", "n"},
      {R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2,0]]}})", "DimensionError", "derivation.matrix"},
      {R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2,0],[0,0,4]]}})", "NotADerivation", ""},
      {R"({"n": 1, "derivation": )", "SyntaxError", "(root)"},
  };
  int i = 0;
  for (const auto& c : cases) {
    const std::string path = temp_spec("heisqi_cli_" + std::to_string(i++) + ".json", c.text);
    const Outcome o = run({"validate", path});
    EXPECT_EQ(o.code, 1) << c.text;
    EXPECT_TRUE(o.out.empty());
    const json e = json::parse(o.err)["error"];
    EXPECT_EQ(e["kind"], c.kind);
    if (*c.field) {
      // File-level errors also say which file they came from.
      EXPECT_EQ(e["field"], c.field);
      EXPECT_NE(e["message"].get<std::string>().find(path), std::string::npos);
    }
    std::remove(path.c_str());
  }
  const Outcome missing = run({"validate", "/nonexistent/spec.json"});
  EXPECT_EQ(missing.code, 1);
  const Outcome point = run({"dist", samples_path("diag123.json"), "0,0", "0,0,0"});
  EXPECT_EQ(point.code, 1);
  EXPECT_EQ(json::parse(point.err)["error"]["kind"], "DimensionError");
}

TEST(Cli, StructuralFailuresExitTwo) {
  const std::string jordan =
      temp_spec("heisqi_cli_jordan.json", R"({"n": 1, "derivation": {"matrix": [[1,1,0],[0,1,0],[0,0,2]]}})");
  const Outcome o = run({"validate", jordan});
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(json::parse(o.err)["error"]["kind"], "NonDiagonalizable");
  std::remove(jordan.c_str());
}
