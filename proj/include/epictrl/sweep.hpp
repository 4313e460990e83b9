#pragma once

// Forward-backward sweep for the optimality system and the outer search over
// the terminal time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epictrl/controls.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/integrator.hpp"
#include "epictrl/model.hpp"
#include "epictrl/objective.hpp"
#include "epictrl/trajectory.hpp"

namespace epictrl {

struct SweepOptions {
  double relaxation = 0.5;  // weight of the freshly computed controls
  double tolerance = 1e-4;  // on max |du| + gamma_1 |dv| between iterates
  std::size_t max_iterations = 500;
  AdjointOptions adjoint;
  ForwardOptions forward;

  bool operator==(const SweepOptions&) const = default;
};

inline std::vector<std::string> sweep_option_violations(const SweepOptions& options) {
  std::vector<std::string> out;
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) out.emplace_back("relaxation out of (0,1]");
  if (!(options.tolerance > 0.0)) out.emplace_back("sweep tolerance must be positive");
  if (options.max_iterations == 0) out.emplace_back("max_iterations must be at least 1");
  return out;
}

struct OptimalSolution {
  ControlSignal controls;
  Trajectory state_traj;
  AdjointTrajectory adjoint_traj;
  double cost = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Last control change measured by the stopping rule.
  double final_change = 0.0;
  /// J of the controls entering each sweep iteration.
  std::vector<double> cost_history;
  /// H + M'(tau) at the horizon; set when the horizon was optimized.
  std::optional<double> transversality_residual;
};

/// H(tau) + M'(tau) for a solved problem. The costates vanish at tau, so H
/// reduces to the running cost there.
inline double transversality_residual(const OptimalSolution& solution, const ModelParams& params,
                                      const CostWeights& weights, double tau) {
  const std::size_t last = solution.controls.size() - 1;
  const auto c = solution.controls.sample(last);
  const double h = hamiltonian(solution.state_traj.back(), solution.adjoint_traj.back(), c.u, c.v, params, weights);
  return h + weights.terminal.derivative(tau);
}

/// Solve the state/costate/control optimality system by relaxed fixed-point
/// sweeps, starting from `start` or from zero controls.
inline OptimalSolution fbsm_solve(const StateVector& initial, const ModelParams& params, const CostWeights& weights,
                                  const TimeGrid& grid, const ImpulseSchedule& schedule = {},
                                  const SweepOptions& options = {}, const ControlSignal* start = nullptr) {
  if (auto bad = sweep_option_violations(options); !bad.empty()) throw RangeError(bad.front());
  if (weights.sigma.size() != params.doses()) throw DimensionError("sigma length differs from dose count");

  OptimalSolution out;
  out.controls = start ? *start : ControlSignal::constant(grid.nodes(), 0.0, 0.0);
  auto& controls = out.controls;
  const double gamma1 = params.gamma.front();
  const double theta = options.relaxation;

  for (std::size_t iteration = 1; iteration <= options.max_iterations; ++iteration) {
    const auto traj = integrate_forward(initial, controls, params, grid, schedule, options.forward);
    out.cost_history.push_back(total_cost(traj, controls, weights, params, grid.tau()));
    const auto adjoint = integrate_adjoint_backward(traj, controls, params, weights, grid, schedule, options.adjoint);

    double change = 0.0;
    for (std::size_t i = 0; i < controls.size(); ++i) {
      const auto fresh = control_update(traj.after(i), adjoint.after(i), params, weights);
      const double u = theta * fresh.u + (1.0 - theta) * controls.u[i];
      const double v = theta * fresh.v + (1.0 - theta) * controls.v[i];
      change = std::max(change, std::abs(u - controls.u[i]) + gamma1 * std::abs(v - controls.v[i]));
      controls.u[i] = u;
      controls.v[i] = v;
    }
    out.iterations = iteration;
    out.final_change = change;
    if (change < options.tolerance) {
      out.converged = true;
      break;
    }
  }

  // Relaxed iterates only approach the box faces geometrically; finish with
  // one unrelaxed update so saturated samples sit exactly on the bounds.
  if (out.converged) {
    const auto traj = integrate_forward(initial, controls, params, grid, schedule, options.forward);
    const auto adjoint = integrate_adjoint_backward(traj, controls, params, weights, grid, schedule, options.adjoint);
    for (std::size_t i = 0; i < controls.size(); ++i) {
      const auto fresh = control_update(traj.after(i), adjoint.after(i), params, weights);
      controls.u[i] = fresh.u;
      controls.v[i] = fresh.v;
    }
  }

  out.state_traj = integrate_forward(initial, controls, params, grid, schedule, options.forward);
  out.adjoint_traj = integrate_adjoint_backward(out.state_traj, controls, params, weights, grid, schedule,
                                                options.adjoint);
  out.cost = total_cost(out.state_traj, controls, weights, params, grid.tau());
  return out;
}

struct GoldenSectionResult {
  double argmin = 0.0;
  double minimum = 0.0;
  std::vector<std::pair<double, double>> evaluations;
};

/// Golden-section minimization of f on [a, b] down to an interval of width
/// `tolerance`. Both end points are evaluated too and the best point seen is
/// returned, so monotone objectives land exactly on the boundary.
inline GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                                   double tolerance) {
  if (!(a < b)) throw RangeError("golden-section search needs a < b");
  if (!(tolerance > 0.0)) throw RangeError("golden-section tolerance must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  GoldenSectionResult out;
  const auto eval = [&](double x) {
    const double y = f(x);
    out.evaluations.emplace_back(x, y);
    return y;
  };
  eval(a);
  eval(b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  const auto best = std::min_element(out.evaluations.begin(), out.evaluations.end(),
                                     [](const auto& l, const auto& r) { return l.second < r.second; });
  out.argmin = best->first;
  out.minimum = best->second;
  return out;
}

struct TerminalTimeResult {
  double tau_star = 0.0;
  OptimalSolution solution;
  /// (tau, J) for every horizon the search solved, in evaluation order.
  std::vector<std::pair<double, double>> evaluations;
};

/// Impulses strictly inside (0, tau).
inline ImpulseSchedule truncate_schedule(const ImpulseSchedule& schedule, double tau) {
  ImpulseSchedule out;
  for (const auto& e : schedule.events) {
    if (e.time < tau) out.events.push_back(e);
  }
  return out;
}

/// Minimize tau -> J(v*_tau, u*_tau, tau) over [tau_min, tau_max] by golden
/// section, solving the fixed-horizon problem at every probe. Horizons are
/// rounded to multiples of `step`; solves are cached per rounded horizon.
inline TerminalTimeResult optimize_terminal_time(const StateVector& initial, const ModelParams& params,
                                                 const CostWeights& weights, const ImpulseSchedule& schedule,
                                                 double tau_min, double tau_max, double step,
                                                 const SweepOptions& options = {}, double tolerance = 0.0) {
  if (!(tau_min > 0.0 && tau_min < tau_max)) throw RangeError("terminal-time search needs 0 < tau_min < tau_max");
  if (!(step > 0.0)) throw RangeError("time step must be positive");
  if (tolerance <= 0.0) tolerance = std::max(step, 1e-3 * (tau_max - tau_min));

  std::map<std::size_t, OptimalSolution> solved;
  TerminalTimeResult out;
  const auto solve = [&](double tau) -> const OptimalSolution& {
    const auto grid = TimeGrid::make(tau, step);
    auto it = solved.find(grid.steps());
    if (it == solved.end()) {
      it = solved.emplace(grid.steps(),
                          fbsm_solve(initial, params, weights, grid, truncate_schedule(schedule, grid.tau()), options))
               .first;
      out.evaluations.emplace_back(grid.tau(), it->second.cost);
    }
    return it->second;
  };

  const auto search = golden_section_minimize([&](double tau) { return solve(tau).cost; }, tau_min, tau_max,
                                              tolerance);
  const auto grid = TimeGrid::make(search.argmin, step);
  out.tau_star = grid.tau();
  out.solution = solved.at(grid.steps());
  out.solution.transversality_residual = transversality_residual(out.solution, params, weights, out.tau_star);
  return out;
}

}  // namespace epictrl
