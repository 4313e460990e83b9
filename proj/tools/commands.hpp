#pragma once

// Subcommands of the epictrl tool. Each returns a process exit code:
// 0 success, 1 bad input or numerical failure, 2 sweep did not converge.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "epictrl/controls.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/integrator.hpp"
#include "epictrl/model.hpp"
#include "epictrl/objective.hpp"
#include "epictrl/report.hpp"
#include "epictrl/scenarios.hpp"
#include "epictrl/sweep.hpp"

namespace epictrl::cli {

enum class ControlsMode { none, max, file };

struct SimulateArgs {
  std::optional<std::string> config;
  ControlsMode controls = ControlsMode::none;
  std::string controls_file;
  std::string out = ".";
  bool impulsive = false;
};

struct OptimizeArgs {
  std::optional<std::string> config;
  std::optional<std::pair<double, double>> free_tau;
  std::string out = ".";
  bool impulsive = false;
};

struct CompareArgs {
  std::vector<std::string> diseases{"covid19", "ebola", "influenza"};
  bool impulsive = false;
  std::string out = ".";
};

struct R0Args {
  std::optional<std::string> config;
};

namespace detail {

inline RunConfig resolve_config(const std::optional<std::string>& path) {
  if (!path) {
    spdlog::info("no --config given, using the covid19 defaults");
    return default_config("covid19");
  }
  return load_valid_config(*path);
}

inline ImpulseSchedule schedule_for(const RunConfig& cfg, double tau, bool impulsive) {
  if (cfg.schedule) return *cfg.schedule;
  return impulsive ? default_schedule(tau) : ImpulseSchedule{};
}

inline std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::path out(dir);
  std::filesystem::create_directories(out);
  return out;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid configuration\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}

struct OptimizeOutcome {
  double tau = 0.0;
  OptimalSolution solution;
};

inline OptimizeOutcome solve(const RunConfig& cfg, const std::optional<std::pair<double, double>>& free_tau,
                             bool impulsive) {
  OptimizeOutcome out;
  if (free_tau) {
    const auto [lo, hi] = *free_tau;
    const auto schedule = schedule_for(cfg, hi, impulsive);
    spdlog::info("searching the horizon over [{}, {}]", lo, hi);
    auto result = optimize_terminal_time(cfg.initial, cfg.params, cfg.weights, schedule, lo, hi, cfg.grid.step,
                                         cfg.solver);
    for (const auto& [tau, cost] : result.evaluations) spdlog::debug("tau={} J={}", tau, cost);
    out.tau = result.tau_star;
    out.solution = std::move(result.solution);
  } else {
    const auto grid = cfg.grid.make();
    const auto schedule = truncate_schedule(schedule_for(cfg, grid.tau(), impulsive), grid.tau());
    out.tau = grid.tau();
    out.solution = fbsm_solve(cfg.initial, cfg.params, cfg.weights, grid, schedule, cfg.solver);
  }
  const auto& s = out.solution;
  if (s.converged) {
    spdlog::info("sweep converged after {} iterations, J={}", s.iterations, s.cost);
  } else {
    spdlog::warn("sweep stopped after {} iterations without converging (last change {})", s.iterations,
                 s.final_change);
  }
  return out;
}

inline RunSummary write_optimize_outputs(const std::filesystem::path& dir, const OptimizeOutcome& outcome) {
  const auto& s = outcome.solution;
  write_controls_csv(dir / "controls.csv", s.controls);
  write_trajectory_csv(dir / "trajectory.csv", s.state_traj, s.controls);
  write_adjoints_csv(dir / "adjoints.csv", s.adjoint_traj);
  auto summary = summarize(s.state_traj, s.cost);
  summary.iterations = s.iterations;
  summary.converged = s.converged;
  summary.transversality_residual = s.transversality_residual;
  write_summary_json(dir / "summary.json", summary);
  return summary;
}

}  // namespace detail

inline int cmd_simulate(const SimulateArgs& args) {
  return detail::guarded([&] {
    const auto cfg = detail::resolve_config(args.config);
    const auto grid = cfg.grid.make();
    const auto schedule = truncate_schedule(detail::schedule_for(cfg, grid.tau(), args.impulsive), grid.tau());

    ControlSignal controls;
    switch (args.controls) {
      case ControlsMode::none:
        controls = ControlSignal::constant(grid.nodes(), 0.0, 0.0);
        break;
      case ControlsMode::max:
        controls = ControlSignal::constant(grid.nodes(), cfg.params.max_vaccination(), 1.0);
        break;
      case ControlsMode::file:
        if (args.controls_file.empty()) throw Error("--controls file needs --controls-file PATH");
        controls = read_controls_csv(args.controls_file);
        if (auto bad = control_violations(controls, cfg.params.gamma.front()); !bad.empty()) {
          throw ValidationError(bad);
        }
        break;
    }

    const auto traj = integrate_forward(cfg.initial, controls, cfg.params, grid, schedule, cfg.solver.forward);
    const double cost = total_cost(traj, controls, cfg.weights, cfg.params, grid.tau());
    const auto dir = detail::prepare_out(args.out);
    write_trajectory_csv(dir / "trajectory.csv", traj, controls);
    write_summary_json(dir / "summary.json", summarize(traj, cost));
    spdlog::info("simulated {} days, J={}", grid.tau(), cost);
    return 0;
  });
}

inline int cmd_optimize(const OptimizeArgs& args) {
  return detail::guarded([&] {
    const auto cfg = detail::resolve_config(args.config);
    const auto outcome = detail::solve(cfg, args.free_tau, args.impulsive);
    const auto dir = detail::prepare_out(args.out);
    detail::write_optimize_outputs(dir, outcome);
    return outcome.solution.converged ? 0 : 2;
  });
}

inline int cmd_compare(const CompareArgs& args) {
  return detail::guarded([&] {
    if (args.diseases.empty()) throw Error("no diseases requested");
    for (const auto& name : args.diseases) preset(name);

    std::vector<std::pair<std::string, detail::OptimizeOutcome>> runs;
    for (const auto& name : args.diseases) {
      spdlog::info("optimizing {}", name);
      runs.emplace_back(name, detail::solve(default_config(name), std::nullopt, args.impulsive));
    }

    const auto dir = detail::prepare_out(args.out);
    bool all_converged = true;
    std::ofstream merged(dir / "comparison.csv");
    if (!merged) throw Error("cannot write " + (dir / "comparison.csv").string());
    merged << "disease," << trajectory_header(runs.front().second.solution.state_traj.back().doses()) << '\n';
    for (const auto& [name, outcome] : runs) {
      const auto sub = detail::prepare_out((dir / name).string());
      detail::write_optimize_outputs(sub, outcome);
      write_trajectory_rows(merged, outcome.solution.state_traj, outcome.solution.controls, name + ",");
      all_converged = all_converged && outcome.solution.converged;
    }
    return all_converged ? 0 : 2;
  });
}

inline int cmd_r0(const R0Args& args, std::ostream& out = std::cout) {
  return detail::guarded([&] {
    const auto cfg = detail::resolve_config(args.config);
    const double r0 = basic_reproduction_number(cfg.params, total_population(cfg.initial));
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.15g", r0);
    out << "R0 = " << buffer << '\n';
    if (cfg.params == preset("covid19").params) {
      out << "note: 1.52 is often quoted for this covid19 parameter set; the closed-form threshold above,"
             " with N0 = total initial population, does not reproduce it\n";
    }
    return 0;
  });
}

}  // namespace epictrl::cli
