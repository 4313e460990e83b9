#pragma once

// Brute-force and finite-difference validators for the sweep solver. Both
// only use forward integration and the cost functional.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "epictrl/controls.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/integrator.hpp"
#include "epictrl/model.hpp"
#include "epictrl/objective.hpp"
#include "epictrl/trajectory.hpp"

namespace epictrl {

struct OracleConfig {
  std::size_t segments = 5;
  std::size_t u_levels = 3;
  std::size_t v_levels = 3;
  /// Upper bound on the number of enumerated control pairs.
  std::uint64_t max_candidates = 10'000'000;
};

struct OracleResult {
  double best_cost = std::numeric_limits<double>::infinity();
  ControlSignal best_controls;
  std::uint64_t candidates = 0;
};

/// u_levels^segments * v_levels^segments, or nullopt-like max on overflow.
inline std::uint64_t oracle_candidate_count(const OracleConfig& config) {
  std::uint64_t total = 1;
  const auto limit = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t s = 0; s < config.segments; ++s) {
    for (std::size_t levels : {config.u_levels, config.v_levels}) {
      if (levels != 0 && total > limit / levels) return limit;
      total *= levels;
    }
  }
  return total;
}

/// Level j of `levels` equally spaced values spanning [0, top].
inline double oracle_level(std::size_t j, std::size_t levels, double top) {
  return levels <= 1 ? 0.0 : top * static_cast<double>(j) / static_cast<double>(levels - 1);
}

/// Exhaustive minimum of J over piecewise-constant control pairs with
/// `segments` equal pieces and discrete levels spanning each control box.
///
/// Ties keep the first candidate in enumeration order, so the result does
/// not depend on evaluation order.
inline OracleResult brute_force_optimum(const StateVector& initial, const ModelParams& params,
                                        const CostWeights& weights, const TimeGrid& grid, const OracleConfig& config,
                                        const ImpulseSchedule& schedule = {}) {
  if (config.segments == 0 || config.u_levels == 0 || config.v_levels == 0) {
    throw ExplosionGuardError("oracle needs at least one segment and one level per control");
  }
  const std::uint64_t total = oracle_candidate_count(config);
  if (total > config.max_candidates) {
    throw ExplosionGuardError("oracle would enumerate " + std::to_string(total) + " candidates (limit " +
                              std::to_string(config.max_candidates) + ")");
  }
  if (config.segments > grid.steps()) throw ExplosionGuardError("more oracle segments than grid steps");

  const std::size_t nodes = grid.size();
  std::vector<std::size_t> segment_of(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::size_t interval = i < grid.steps() ? i : grid.steps() - 1;
    segment_of[i] = interval * config.segments / grid.steps();
  }

  ControlSignal candidate = ControlSignal::constant(grid.nodes(), 0.0, 0.0);
  candidate.interpolation = ControlInterpolation::hold;
  std::vector<std::size_t> u_index(config.segments, 0);
  std::vector<std::size_t> v_index(config.segments, 0);
  const double v_top = params.max_vaccination();

  OracleResult out;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (std::size_t s = 0; s < config.segments; ++s) {
      u_index[s] = static_cast<std::size_t>(rest % config.u_levels);
      rest /= config.u_levels;
      v_index[s] = static_cast<std::size_t>(rest % config.v_levels);
      rest /= config.v_levels;
    }
    for (std::size_t i = 0; i < nodes; ++i) {
      const std::size_t s = segment_of[i];
      candidate.u[i] = oracle_level(u_index[s], config.u_levels, 1.0);
      candidate.v[i] = oracle_level(v_index[s], config.v_levels, v_top);
    }
    const auto traj = integrate_forward(initial, candidate, params, grid, schedule);
    const double cost = total_cost(traj, candidate, weights, params, grid.tau());
    if (cost < out.best_cost) {
      out.best_cost = cost;
      out.best_controls = candidate;
    }
  }
  out.candidates = total;
  return out;
}

/// Central difference (J(c + eps phi) - J(c - eps phi)) / (2 eps) where phi
/// raises one control sample (a hat function under linear interpolation).
inline double finite_difference_gradient(const StateVector& initial, const ModelParams& params,
                                         const CostWeights& weights, const TimeGrid& grid,
                                         const ControlSignal& controls, std::size_t node, double epsilon,
                                         ControlChannel channel, const ImpulseSchedule& schedule = {}) {
  if (node >= controls.size()) throw GridMismatchError("perturbed node outside the control grid");
  if (!(epsilon > 0.0)) throw BoxViolationError("finite-difference step must be positive");
  const bool treatment = channel == ControlChannel::treatment;
  const double top = treatment ? 1.0 : params.max_vaccination();
  const double base = treatment ? controls.u[node] : controls.v[node];
  if (base - epsilon < 0.0 || base + epsilon > top) {
    throw BoxViolationError("perturbation by " + std::to_string(epsilon) + " leaves the control box at node " +
                            std::to_string(node));
  }
  const auto cost_with = [&](double value) {
    ControlSignal perturbed = controls;
    (treatment ? perturbed.u : perturbed.v)[node] = value;
    const auto traj = integrate_forward(initial, perturbed, params, grid, schedule);
    return total_cost(traj, perturbed, weights, params, grid.tau());
  };
  return (cost_with(base + epsilon) - cost_with(base - epsilon)) / (2.0 * epsilon);
}

}  // namespace epictrl
