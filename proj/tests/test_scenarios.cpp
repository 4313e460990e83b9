#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "epictrl/scenarios.hpp"
#include "support.hpp"

using namespace epictrl;

namespace {

bool contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

const std::string kShippedConfig = std::string(EPICTRL_SOURCE_DIR) + "/configs/covid19.json";

}  // namespace

TEST(Presets, CovidValues) {
  EXPECT_EQ(preset("covid19").params.k, 0.54);
  EXPECT_EQ(preset("ebola").params.alpha, 0.26);
  EXPECT_EQ(preset("influenza").params.p, 0.9);
  EXPECT_EQ(preset("covid19").params.beta, 5e-4);
  EXPECT_EQ(total_population(preset("ebola").initial), 10000.0);
}

TEST(Presets, UnknownName) { EXPECT_THROW(preset("measles"), UnknownPresetError); }

TEST(Presets, AllValidate) {
  for (const auto& name : preset_names()) {
    EXPECT_TRUE(validate_config(default_config(name)).empty()) << name;
    EXPECT_TRUE(parameter_violations(preset(name).params).empty()) << name;
  }
}

TEST(Validation, GammaOrder) {
  auto cfg = default_config("covid19");
  cfg.params.gamma = {1.0, 2.0};
  EXPECT_TRUE(contains(validate_config(cfg), "gamma not non-increasing"));
}

TEST(Validation, ImpulseRateRange) {
  auto cfg = default_config("covid19");
  cfg.schedule = ImpulseSchedule{{{7.0, {1.5, 0.0, 0.0, 0.0}}}};
  EXPECT_TRUE(contains(validate_config(cfg), "impulse rate out of [0,1]"));
}

TEST(Validation, ListsEveryProblem) {
  auto cfg = default_config("covid19");
  cfg.params.gamma = {1.0, 2.0};
  cfg.params.z = 3.0;
  cfg.weights.sigma0 = 0.0;
  cfg.grid.step = -1.0;
  const auto v = validate_config(cfg);
  EXPECT_GE(v.size(), 4u);
  EXPECT_TRUE(contains(v, "z out of [0,1]"));
  EXPECT_TRUE(contains(v, "sigma0 must be positive"));
}

TEST(Validation, ImpulseOutsideHorizon) {
  auto cfg = default_config("covid19");
  cfg.schedule = ImpulseSchedule{{{40.0, {0.1, 0.0, 0.0, 0.0}}}};
  EXPECT_FALSE(validate_config(cfg).empty());
}

TEST(Config, ShippedDefaultIsValid) {
  const auto cfg = load_config(kShippedConfig);
  EXPECT_TRUE(validate_config(cfg).empty());
  EXPECT_EQ(cfg, default_config("covid19"));
}

TEST(Config, SaveLoadRoundTrip) {
  const auto dir = epictrl::testing::scratch_dir("roundtrip");
  for (const auto& name : preset_names()) {
    auto cfg = default_config(name);
    cfg.schedule = default_schedule(cfg.grid.tau);
    cfg.solver.adjoint.impulse = AdjointImpulse::literal;
    cfg.params.include_delta_n = true;
    cfg.weights.terminal = {TerminalCost::Kind::exponential, 0.5, 0.1};
    const auto path = (dir / (name + ".json")).string();
    save_config(cfg, path);
    EXPECT_EQ(load_config(path), cfg) << name;
  }
}

TEST(Config, PresetNamesAsValues) {
  const auto cfg = parse_config(R"({"params": "ebola", "initial": "covid19"})");
  EXPECT_EQ(cfg.params, preset("ebola").params);
  EXPECT_EQ(cfg.initial, preset("covid19").initial);
  EXPECT_EQ(cfg.weights, default_weights(2));
}

TEST(Config, UnknownKeysAreErrors) {
  try {
    parse_config(R"({"params": "covid19", "initial": "covid19", "grid": {"tua": 3}, "extra": 1})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("grid.tua: unknown key"), std::string::npos) << what;
    EXPECT_NE(what.find("extra: unknown key"), std::string::npos) << what;
  }
}

TEST(Config, SyntaxErrorReportsLine) {
  try {
    parse_config("{\n  \"params\": \"covid19\",\n  \"initial\": ,\n}", "bad.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Config, WrongTypesAreCollected) {
  try {
    parse_config(R"({"params": {"beta": "high"}, "initial": "covid19", "solver": {"max_iterations": -3}})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("params.beta: expected a number"), std::string::npos) << what;
    EXPECT_NE(what.find("params.gamma: missing"), std::string::npos) << what;
    EXPECT_NE(what.find("solver.max_iterations"), std::string::npos) << what;
  }
}

TEST(Config, UnknownPresetName) {
  EXPECT_THROW(parse_config(R"({"params": "measles", "initial": "covid19"})"), ParseError);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/epictrl.json"), ParseError); }

TEST(DefaultSchedule, WeeklyInsideHorizon) {
  const auto s = default_schedule(35.0);
  ASSERT_EQ(s.events.size(), 4u);
  EXPECT_EQ(s.events.front().time, 7.0);
  EXPECT_EQ(s.events.back().time, 28.0);
  EXPECT_TRUE(schedule_violations(s, 35.0).empty());
}
