#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("epictrl");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("EPICTRL_LOG")) spdlog::cfg::helpers::load_levels(level);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using namespace epictrl::cli;

  CLI::App app{"Optimal vaccination and treatment control for a VS-EIAR epidemic model"};
  app.require_subcommand(1);
  std::string config;
  std::string out = ".";
  long long seed = 0;
  app.add_option("--config", config, "JSON run configuration (defaults to the covid19 preset)");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "reserved; the solvers are deterministic");

  SimulateArgs sim;
  std::string controls_mode = "none";
  auto* simulate = app.add_subcommand("simulate", "integrate the model under fixed controls");
  simulate->add_option("--controls", controls_mode, "none | max | file")
      ->check(CLI::IsMember({"none", "max", "file"}));
  simulate->add_option("--controls-file", sim.controls_file, "t,u,v CSV used with --controls file");
  simulate->add_flag("--impulsive", sim.impulsive, "apply the weekly impulse schedule");

  OptimizeArgs opt;
  std::vector<double> free_tau;
  auto* optimize = app.add_subcommand("optimize", "solve the optimal control problem");
  optimize->add_option("--free-tau", free_tau, "search the horizon in [MIN, MAX]")->expected(2);
  optimize->add_flag("--impulsive", opt.impulsive, "apply the weekly impulse schedule");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "optimize several disease presets side by side");
  compare->add_option("--diseases", cmp.diseases, "preset names")->delimiter(',');
  compare->add_flag("--impulsive", cmp.impulsive, "apply the weekly impulse schedule");

  auto* r0 = app.add_subcommand("r0", "print the basic reproduction number");

  for (auto* sub : {simulate, optimize, compare, r0}) {
    sub->add_option("--config", config, "JSON run configuration");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "reserved; the solvers are deterministic");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const auto config_path = config.empty() ? std::optional<std::string>{} : std::optional<std::string>{config};

  if (*simulate) {
    sim.config = config_path;
    sim.out = out;
    sim.controls = controls_mode == "max" ? ControlsMode::max
                   : controls_mode == "file" ? ControlsMode::file
                                             : ControlsMode::none;
    return cmd_simulate(sim);
  }
  if (*optimize) {
    opt.config = config_path;
    opt.out = out;
    if (!free_tau.empty()) opt.free_tau = std::pair{free_tau[0], free_tau[1]};
    return cmd_optimize(opt);
  }
  if (*compare) {
    cmp.out = out;
    return cmd_compare(cmp);
  }
  return cmd_r0(R0Args{config_path});
}
