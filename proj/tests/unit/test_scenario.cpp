#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "scatlab/errors.hpp"
#include "scatlab/scenario.hpp"

using namespace scatlab;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("scatlab_test_" + name);
  fs::remove_all(p);
  return p;
}
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST(Scenario, ParseErrorReportsLineAndColumn) {
  try {
    parse_scenario("{\n  \"name\": \"x\",\n  \"pipeline\": [ ,]\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.kind(), ConfigErrorKind::Parse);
    EXPECT_NE(e.where().find("line 3"), std::string::npos) << e.where();
  }
}

TEST(Scenario, UnknownOpNamed) {
  const auto s = parse_scenario(R"({"name": "x", "pipeline": [{"op": "frobnicate"}]})");
  try {
    validate_scenario(s);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.kind(), ConfigErrorKind::UnknownOp);
    EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
  }
}

TEST(Scenario, MissingParameterNamed) {
  const auto s = parse_scenario(R"({"name": "x", "pipeline": [{"op": "decay_fit"}]})");
  try {
    validate_scenario(s);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.kind(), ConfigErrorKind::MissingParameter);
  }
}

TEST(Scenario, BadValues) {
  EXPECT_THROW(parse_scenario(R"({"name": "x", "seed": "seven", "pipeline": []})"), ConfigError);
  EXPECT_THROW(parse_potential("gaussian:abc"), ConfigError);
  EXPECT_THROW(parse_potential("square_well:1"), ConfigError);
  EXPECT_NO_THROW(parse_potential("yukawa:0.5:2"));
  EXPECT_NEAR(parse_potential("aubin_talenti:2")(0.0), -5.0 * 4.0, 1e-12);
}

TEST(Scenario, ParamsAccessors) {
  Params p("pipeline[0].params");
  p.set("a", 2.5);
  p.set("flag", true);
  p.set("name", std::string("z"));
  p.set("xs", std::vector<double>{1.0, 2.0});
  EXPECT_EQ(p.number("a"), 2.5);
  EXPECT_EQ(p.number("missing", 4.0), 4.0);
  EXPECT_TRUE(p.flag("flag", false));
  EXPECT_EQ(p.text("name"), "z");
  EXPECT_EQ(p.list("xs", {}).size(), 2u);
  EXPECT_THROW(p.number("name"), ConfigError);
  EXPECT_THROW(p.number("missing"), ConfigError);
}

TEST(Scenario, EmptyPipelineSucceedsWithoutArtifacts) {
  const auto dir = temp_dir("empty");
  RunOptions o;
  o.out_dir = dir;
  const auto r = run_scenario(parse_scenario(R"({"name": "empty", "pipeline": []})"), o);
  EXPECT_EQ(r.code, ExitCode::Success);
  EXPECT_TRUE(r.steps.empty());
  EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
}

TEST(Scenario, ExpectationFailureExitsOne) {
  const auto s = parse_scenario(
      R"({"name": "x", "pipeline": [{"op": "kato", "expect": {"kato_error": {"max": -1}}}]})");
  RunOptions o;
  o.write_artifacts = false;
  const auto r = run_scenario(s, o);
  EXPECT_EQ(r.code, ExitCode::AssertionFailed);
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_EQ(r.steps[0].failures.size(), 1u);
}

TEST(Scenario, NumericFailureExitsTwo) {
  // too few samples in the fit window
  const auto s = parse_scenario(
      R"({"name": "x", "pipeline": [{"op": "decay_fit", "params": {"potential": "zero", "t_max": 2, "t_min": 0.2}}]})");
  RunOptions o;
  o.write_artifacts = false;
  EXPECT_EQ(run_scenario(s, o).code, ExitCode::NumericFailure);
}

TEST(Scenario, DeterministicArtifacts) {
  const auto s = *builtin_scenario("algebra_axioms");
  RunOptions a, b;
  a.out_dir = temp_dir("det_a");
  b.out_dir = temp_dir("det_b");
  const auto ra = run_scenario(s, a), rb = run_scenario(s, b);
  ASSERT_EQ(ra.code, ExitCode::Success);
  ASSERT_EQ(ra.steps.size(), rb.steps.size());
  std::size_t compared = 0;
  for (std::size_t k = 0; k < ra.steps.size(); ++k) {
    ASSERT_EQ(ra.steps[k].artifacts.size(), rb.steps[k].artifacts.size());
    for (std::size_t j = 0; j < ra.steps[k].artifacts.size(); ++j) {
      const auto& pa = ra.steps[k].artifacts[j];
      if (pa.extension() != ".csv") continue;
      EXPECT_EQ(slurp(pa), slurp(rb.steps[k].artifacts[j])) << pa;
      ++compared;
    }
  }
  EXPECT_TRUE(fs::exists(a.out_dir / "summary.json"));
}

TEST(Scenario, SeedOverrideChangesRandomOps) {
  const auto s = *builtin_scenario("algebra_axioms");
  RunOptions a, b;
  a.write_artifacts = b.write_artifacts = false;
  a.seed = 1;
  b.seed = 2;
  const auto ra = run_scenario(s, a), rb = run_scenario(s, b);
  EXPECT_NE(ra.steps[0].metrics, rb.steps[0].metrics);
}

TEST(Scenario, CatalogueAndBuiltins) {
  EXPECT_GE(op_catalog().size(), 10u);
  std::set<std::string> ops;
  for (const auto& op : op_catalog()) ops.insert(op.name);
  EXPECT_GE(builtin_scenarios().size(), 11u);
  for (const auto& b : builtin_scenarios()) {
    const auto s = builtin_scenario(b.name);
    ASSERT_TRUE(s.has_value()) << b.name;
    EXPECT_NO_THROW(validate_scenario(*s)) << b.name;
    EXPECT_GT(s->expected_runtime, 0.0) << b.name;
    for (const auto& st : s->pipeline) EXPECT_TRUE(ops.count(st.op)) << st.op;
  }
  EXPECT_FALSE(builtin_scenario("nope").has_value());
}

TEST(Scenario, LoadMissingFileIsConfigError) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}
