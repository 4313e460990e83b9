#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "epictrl/errors.hpp"

namespace epictrl {

/// How a sampled control is evaluated between two samples.
enum class ControlInterpolation {
  linear,  // piecewise linear through the samples
  hold,    // sample i is held on [t_i, t_{i+1})
};

struct ControlValue {
  double v = 0.0;
  double u = 0.0;
};

/// Vaccination v(t) and treatment u(t) sampled on a time grid.
struct ControlSignal {
  std::vector<double> grid;
  std::vector<double> v;
  std::vector<double> u;
  ControlInterpolation interpolation = ControlInterpolation::linear;

  static ControlSignal constant(std::vector<double> grid, double v_value, double u_value) {
    ControlSignal out;
    out.v.assign(grid.size(), v_value);
    out.u.assign(grid.size(), u_value);
    out.grid = std::move(grid);
    return out;
  }

  std::size_t size() const noexcept { return grid.size(); }

  ControlValue sample(std::size_t i) const { return {v[i], u[i]}; }

  /// Value inside interval [t_i, t_{i+1}] at relative position `fraction` in [0, 1].
  ///
  /// With hold interpolation the whole closed interval sees sample i, so an
  /// integrator stage at the right end of a step stays on that step's control.
  ControlValue on_interval(std::size_t i, double fraction) const {
    if (interpolation == ControlInterpolation::hold || fraction == 0.0) return sample(i);
    const double w = fraction;
    return {(1.0 - w) * v[i] + w * v[i + 1], (1.0 - w) * u[i] + w * u[i + 1]};
  }

  /// Evaluate at an arbitrary time; clamps to the end samples outside the grid.
  ControlValue at(double t) const {
    if (t <= grid.front()) return sample(0);
    if (t >= grid.back()) return sample(grid.size() - 1);
    const auto upper = std::upper_bound(grid.begin(), grid.end(), t);
    const auto i = static_cast<std::size_t>(upper - grid.begin()) - 1;
    const double fraction = (t - grid[i]) / (grid[i + 1] - grid[i]);
    return on_interval(i, fraction);
  }
};

/// Box and shape violations of a control signal for the given gamma_1.
inline std::vector<std::string> control_violations(const ControlSignal& controls, double gamma1) {
  std::vector<std::string> out;
  if (controls.grid.size() < 2) out.emplace_back("control grid needs at least two samples");
  if (controls.v.size() != controls.grid.size() || controls.u.size() != controls.grid.size()) {
    out.emplace_back("control samples and grid differ in length");
    return out;
  }
  for (std::size_t i = 1; i < controls.grid.size(); ++i) {
    if (!(controls.grid[i] > controls.grid[i - 1])) {
      out.emplace_back("control grid not strictly increasing");
      break;
    }
  }
  const double v_max = 1.0 / gamma1;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (!(controls.u[i] >= 0.0 && controls.u[i] <= 1.0)) {
      out.emplace_back("treatment control u out of [0,1]");
      break;
    }
  }
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (!(controls.v[i] >= 0.0 && controls.v[i] <= v_max)) {
      out.emplace_back("vaccination control v out of [0,1/gamma_1]");
      break;
    }
  }
  return out;
}

/// Clamp to [lo, hi]; NaN is an error rather than a silently chosen bound.
inline double clamp_control(double x, double lo, double hi) {
  if (std::isnan(x)) throw NumericalError("NaN reached a control clamp");
  if (x <= lo) return lo;
  if (x >= hi) return hi;
  return x;
}

}  // namespace epictrl
