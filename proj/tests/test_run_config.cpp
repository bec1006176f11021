#include <filesystem>

#include <gtest/gtest.h>

#include "proxgrad/run_config.hpp"

using namespace proxgrad;

namespace {

json base_config() {
  return json::parse(R"({
    "problem": {
      "dimension": 1,
      "smooth": {"name": "quartic"},
      "nonsmooth": {"name": "box", "params": {"lo": -2, "hi": 2}}
    },
    "x0": [1.0]
  })");
}

std::string error_of(const json& j) {
  try {
    parse_run_config(j, "t");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(RunConfig, ShippedConfigsParseWithFiniteStart) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PROXGRAD_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const RunConfig cfg = load_run_config(entry.path());
    EXPECT_EQ(cfg.name, entry.path().stem().string());
    EXPECT_EQ(cfg.x0.size(), cfg.problem.dimension());
    EXPECT_TRUE(psi_eval(cfg.problem, cfg.x0).is_finite()) << cfg.name;
    EXPECT_NO_THROW(validate(cfg.solver));
  }
  EXPECT_GE(count, 5u);
}

TEST(RunConfig, DefaultsAndPresets) {
  json j = base_config();
  j["x0"] = "ones";
  const RunConfig cfg = parse_run_config(j, "demo");
  EXPECT_EQ(cfg.solver, SolverConfig{});
  EXPECT_EQ(cfg.x0, (Vector{1.0}));
  EXPECT_EQ(cfg.output, "demo.trace.csv");
  EXPECT_EQ(cfg.problem.name(), "demo");
  j.erase("x0");
  EXPECT_EQ(parse_run_config(j, "demo").x0, (Vector{0.0}));
}

TEST(RunConfig, InvalidSolverParameterNamesTheBound) {
  json j = base_config();
  j["solver"] = {{"delta", 1.5}};
  EXPECT_NE(error_of(j).find("delta in (0,1)"), std::string::npos) << error_of(j);
  j["solver"] = {{"tau", 1.0}};
  EXPECT_NE(error_of(j).find("tau"), std::string::npos);
  j["solver"] = {{"gamma_min", 10.0}, {"gamma_max", 1.0}};
  EXPECT_NE(error_of(j).find("gamma_min"), std::string::npos);
}

TEST(RunConfig, StartOutsideDomain) {
  json j = base_config();
  j["x0"] = json::array({3.0});
  EXPECT_NE(error_of(j).find("x0 ∉ dom φ"), std::string::npos);
  json s = json::parse(R"({
    "problem": {"dimension": 2, "smooth": {"name": "quartic"},
                "nonsmooth": {"name": "sphere", "params": {"radius": 1}}},
    "x0": "zeros"})");
  EXPECT_NE(error_of(s).find("x0 ∉ dom φ"), std::string::npos);
}

TEST(RunConfig, ShapeAndNameErrors) {
  json j = base_config();
  j["problem"]["smooth"]["name"] = "cubic";
  EXPECT_NE(error_of(j).find("unknown oracle 'cubic'"), std::string::npos);
  j = base_config();
  j["problem"]["nonsmooth"]["name"] = "l2";
  EXPECT_NE(error_of(j).find("'l2'"), std::string::npos);
  j = base_config();
  j["x0"] = json::array({1.0, 2.0});
  EXPECT_NE(error_of(j).find("x0"), std::string::npos);
  j = base_config();
  j["problem"]["dimension"] = 0;
  EXPECT_NE(error_of(j).find("dimension"), std::string::npos);
  j = base_config();
  j["problem"]["nonsmooth"] = {{"name", "l1"}};
  EXPECT_NE(error_of(j).find("lambda"), std::string::npos);
  j = base_config();
  j["solver"] = {{"windw", 3}};
  EXPECT_FALSE(error_of(j).empty());
  EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST(RunConfig, RegistriesListEveryOracle) {
  for (const char* n : {"quadratic", "quartic", "logistic"}) EXPECT_TRUE(smooth_registry().contains(n));
  for (const char* n : {"zero", "l1", "l0", "lp_half", "box", "sphere"}) EXPECT_TRUE(prox_registry().contains(n));
}
