#pragma once

// Fixed-step classic RK4 for the state (forward, with impulse jumps) and the
// costates (backward from zero terminal values, with costate jumps).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "epictrl/controls.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/model.hpp"
#include "epictrl/objective.hpp"
#include "epictrl/trajectory.hpp"

namespace epictrl {

/// Costate update at an impulse node when integrating backward.
enum class AdjointImpulse {
  multiplicative,  // p_l(t_k-) = (1 + lambda_l) p_l(t_k+)
  literal,         // p_l(t_k-) = p_l(t_k+) + lambda_l
};

/// How the backward pass reconstructs the state at RK4 mid-stages.
enum class StateInterpolation {
  linear,   // average of the two node samples
  hermite,  // cubic Hermite using the vector field at both nodes
};

struct ForwardOptions {
  /// Negative values down to -tolerance * N0 are treated as roundoff and zeroed.
  double negative_tolerance = 1e-9;

  bool operator==(const ForwardOptions&) const = default;
};

struct AdjointOptions {
  AdjointImpulse impulse = AdjointImpulse::multiplicative;
  StateInterpolation interpolation = StateInterpolation::linear;

  bool operator==(const AdjointOptions&) const = default;
};

namespace detail {

template <typename Tag>
void axpy_into(CompartmentVector<Tag>& out, const CompartmentVector<Tag>& x, double a, std::span<const double> y) {
  auto dst = out.values();
  const auto src = x.values();
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] + a * y[j];
}

inline void require_grid_match(const ControlSignal& controls, const TimeGrid& grid) {
  if (controls.size() != grid.size()) {
    throw GridMismatchError("controls have " + std::to_string(controls.size()) + " samples, grid has " +
                            std::to_string(grid.size()) + " nodes");
  }
  const double slack = 1e-6 * grid.step();
  if (std::abs(controls.grid.front()) > slack || std::abs(controls.grid.back() - grid.tau()) > slack) {
    throw GridMismatchError("control grid does not span [0, tau]");
  }
}

inline void settle_negatives(StateVector& x, double tolerance, double t) {
  for (double& value : x.values()) {
    if (std::isnan(value)) throw StabilityError("NaN state at t=" + std::to_string(t));
    if (value < 0.0) {
      if (value < -tolerance) {
        throw StabilityError("compartment reached " + std::to_string(value) + " at t=" + std::to_string(t) +
                             "; reduce the step");
      }
      value = 0.0;
    }
  }
}

}  // namespace detail

/// Forward RK4 march of the (possibly impulsive) controlled system.
///
/// Impulse nodes get two samples: the state reached by integration, then the
/// state after the jump. Integration continues from the post-jump state.
inline Trajectory integrate_forward(const StateVector& initial, const ControlSignal& controls,
                                    const ModelParams& params, const TimeGrid& grid,
                                    const ImpulseSchedule& schedule = {}, const ForwardOptions& options = {}) {
  require_same_doses(initial, params);
  detail::require_grid_match(controls, grid);
  const auto jumps = impulses_on_grid(schedule, grid);
  const double tolerance = options.negative_tolerance * total_population(initial);
  const std::size_t n = params.doses();

  Trajectory out;
  out.times.reserve(grid.size() + schedule.events.size());
  out.values.reserve(grid.size() + schedule.events.size());
  out.node_begin.reserve(grid.size());

  StateVector x = initial;
  StateVector stage(n);
  StateDerivative k1(n), k2(n), k3(n), k4(n);

  out.node_begin.push_back(0);
  out.times.push_back(0.0);
  out.values.push_back(x);

  for (std::size_t i = 0; i < grid.steps(); ++i) {
    const double h = grid.step();
    const auto c0 = controls.on_interval(i, 0.0);
    const auto cm = controls.on_interval(i, 0.5);
    const auto c1 = controls.on_interval(i, 1.0);

    vector_field(x, c0.v, c0.u, params, k1.values());
    detail::axpy_into(stage, x, 0.5 * h, k1.values());
    vector_field(stage, cm.v, cm.u, params, k2.values());
    detail::axpy_into(stage, x, 0.5 * h, k2.values());
    vector_field(stage, cm.v, cm.u, params, k3.values());
    detail::axpy_into(stage, x, h, k3.values());
    vector_field(stage, c1.v, c1.u, params, k4.values());

    auto xv = x.values();
    const auto d1 = k1.values();
    const auto d2 = k2.values();
    const auto d3 = k3.values();
    const auto d4 = k4.values();
    for (std::size_t j = 0; j < xv.size(); ++j) {
      xv[j] += h / 6.0 * (d1[j] + 2.0 * d2[j] + 2.0 * d3[j] + d4[j]);
    }
    const double t = grid.at(i + 1);
    detail::settle_negatives(x, tolerance, t);

    out.node_begin.push_back(out.values.size());
    out.times.push_back(t);
    out.values.push_back(x);
    if (jumps[i + 1]) {
      x = apply_impulse(x, *jumps[i + 1]);
      out.times.push_back(t);
      out.values.push_back(x);
    }
  }
  return out;
}

/// Backward RK4 march of the costate system from zero terminal values.
///
/// State values at RK4 mid-stages come from the trajectory samples bracketing
/// each step (post-jump on the left, pre-jump on the right).
inline AdjointTrajectory integrate_adjoint_backward(const Trajectory& traj, const ControlSignal& controls,
                                                    const ModelParams& params, const CostWeights& weights,
                                                    const TimeGrid& grid, const ImpulseSchedule& schedule = {},
                                                    const AdjointOptions& options = {}) {
  detail::require_grid_match(controls, grid);
  if (traj.nodes() != grid.size()) {
    throw GridMismatchError("trajectory has " + std::to_string(traj.nodes()) + " nodes, grid has " +
                            std::to_string(grid.size()));
  }
  const auto jumps = impulses_on_grid(schedule, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (traj.jumps_at(i) != jumps[i].has_value()) {
      throw GridMismatchError("trajectory impulse samples do not match the schedule at node " + std::to_string(i));
    }
  }
  require_same_doses(traj.back(), params);
  const std::size_t n = params.doses();

  std::vector<double> times;
  std::vector<AdjointVector> values;
  std::vector<std::size_t> counts(grid.size(), 1);
  times.reserve(traj.times.size());
  values.reserve(traj.times.size());

  AdjointVector lam(n);
  AdjointVector stage(n);
  AdjointVector k1(n), k2(n), k3(n), k4(n);
  StateVector middle(n);

  times.push_back(grid.tau());
  values.push_back(lam);

  for (std::size_t step = grid.steps(); step-- > 0;) {
    const double h = grid.step();
    const StateVector& left = traj.after(step);
    const StateVector& right = traj.before(step + 1);
    const auto c0 = controls.on_interval(step, 0.0);
    const auto cm = controls.on_interval(step, 0.5);
    const auto c1 = controls.on_interval(step, 1.0);

    auto mv = middle.values();
    const auto lv = left.values();
    const auto rv = right.values();
    for (std::size_t j = 0; j < mv.size(); ++j) mv[j] = 0.5 * (lv[j] + rv[j]);
    if (options.interpolation == StateInterpolation::hermite) {
      const auto f_left = vector_field(left, c0.v, c0.u, params);
      const auto f_right = vector_field(right, c1.v, c1.u, params);
      for (std::size_t j = 0; j < mv.size(); ++j) {
        mv[j] += h / 8.0 * (f_left.values()[j] - f_right.values()[j]);
      }
    }

    adjoint_rhs(lam, right, c1.u, c1.v, params, weights, k1.values());
    detail::axpy_into(stage, lam, -0.5 * h, k1.values());
    adjoint_rhs(stage, middle, cm.u, cm.v, params, weights, k2.values());
    detail::axpy_into(stage, lam, -0.5 * h, k2.values());
    adjoint_rhs(stage, middle, cm.u, cm.v, params, weights, k3.values());
    detail::axpy_into(stage, lam, -h, k3.values());
    adjoint_rhs(stage, left, c0.u, c0.v, params, weights, k4.values());

    auto pv = lam.values();
    const auto d1 = k1.values();
    const auto d2 = k2.values();
    const auto d3 = k3.values();
    const auto d4 = k4.values();
    for (std::size_t j = 0; j < pv.size(); ++j) {
      pv[j] -= h / 6.0 * (d1[j] + 2.0 * d2[j] + 2.0 * d3[j] + d4[j]);
      if (std::isnan(pv[j])) throw NumericalError("NaN costate at t=" + std::to_string(grid.at(step)));
    }

    times.push_back(grid.at(step));
    values.push_back(lam);
    if (jumps[step]) {
      const auto& rates = *jumps[step];
      for (std::size_t l = 0; l < rates.size(); ++l) {
        if (options.impulse == AdjointImpulse::multiplicative) {
          pv[l] *= 1.0 + rates[l];
        } else {
          pv[l] += rates[l];
        }
      }
      times.push_back(grid.at(step));
      values.push_back(lam);
      counts[step] = 2;
    }
  }

  AdjointTrajectory out;
  out.times.assign(times.rbegin(), times.rend());
  out.values.assign(values.rbegin(), values.rend());
  out.node_begin.resize(grid.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.node_begin[i] = offset;
    offset += counts[i];
  }
  return out;
}

}  // namespace epictrl
