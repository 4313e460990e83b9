#pragma once

// Time grids, impulse schedules and sampled state/costate paths.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "epictrl/errors.hpp"
#include "epictrl/model.hpp"

namespace epictrl {

/// Uniform grid 0 = t_0 < ... < t_K = tau with step h.
///
/// The requested horizon is rounded to the nearest multiple of h; the
/// rounding is kept so callers can report it.
class TimeGrid {
 public:
  static TimeGrid make(double tau, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw RangeError("time step must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw RangeError("horizon must be positive");
    const double ratio = tau / step;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (steps == 0) throw RangeError("horizon shorter than half a step");
    TimeGrid grid;
    grid.step_ = step;
    grid.steps_ = steps;
    grid.requested_tau_ = tau;
    return grid;
  }

  double step() const noexcept { return step_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double tau() const noexcept { return static_cast<double>(steps_) * step_; }
  double requested_tau() const noexcept { return requested_tau_; }
  double rounding() const noexcept { return tau() - requested_tau_; }

  double at(std::size_t i) const noexcept { return static_cast<double>(i) * step_; }

  std::vector<double> nodes() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
    return out;
  }

  /// Grid node equal to t up to 1e-6 of a step, if any.
  std::optional<std::size_t> node_of(double t) const {
    const double ratio = t / step_;
    const double nearest = std::round(ratio);
    if (nearest < 0.0 || nearest > static_cast<double>(steps_) || std::abs(ratio - nearest) > 1e-6) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(nearest);
  }

 private:
  double step_ = 1.0;
  std::size_t steps_ = 1;
  double requested_tau_ = 1.0;
};

struct ImpulseEvent {
  double time = 0.0;
  ImpulseRates lambda{};

  bool operator==(const ImpulseEvent&) const = default;
};

/// Ordered immigration impulses.
struct ImpulseSchedule {
  std::vector<ImpulseEvent> events;

  bool empty() const noexcept { return events.empty(); }

  bool operator==(const ImpulseSchedule&) const = default;
};

/// Schedule invariants that do not depend on a grid (ordering, rate range).
inline std::vector<std::string> schedule_violations(const ImpulseSchedule& schedule, double tau) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < schedule.events.size(); ++k) {
    const auto& e = schedule.events[k];
    if (!(e.time > 0.0 && e.time < tau)) out.emplace_back("impulse time outside (0, tau)");
    if (k > 0 && !(e.time > schedule.events[k - 1].time)) out.emplace_back("impulse times not strictly increasing");
    for (double rate : e.lambda) {
      if (!(rate >= 0.0 && rate <= 1.0)) {
        out.emplace_back("impulse rate out of [0,1]");
        break;
      }
    }
  }
  return out;
}

/// Per-node impulse rates, or nothing at nodes without an impulse.
inline std::vector<std::optional<ImpulseRates>> impulses_on_grid(const ImpulseSchedule& schedule,
                                                                 const TimeGrid& grid) {
  auto violations = schedule_violations(schedule, grid.tau());
  if (!violations.empty()) throw ScheduleError(violations.front());
  std::vector<std::optional<ImpulseRates>> out(grid.size());
  for (const auto& e : schedule.events) {
    const auto node = grid.node_of(e.time);
    if (!node) {
      throw ScheduleError("impulse at t=" + std::to_string(e.time) + " is not on the grid (h=" +
                          std::to_string(grid.step()) + ")");
    }
    out[*node] = e.lambda;
  }
  return out;
}

/// Samples of a piecewise-smooth path on a grid.
///
/// Nodes with a jump carry two samples, the pre-jump value first.
template <typename Vector>
struct SampledPath {
  std::vector<double> times;
  std::vector<Vector> values;
  /// Index into `values` of each grid node's first sample.
  std::vector<std::size_t> node_begin;

  std::size_t nodes() const noexcept { return node_begin.size(); }

  const Vector& before(std::size_t node) const { return values[node_begin[node]]; }

  const Vector& after(std::size_t node) const {
    const std::size_t last = node + 1 < node_begin.size() ? node_begin[node + 1] - 1 : values.size() - 1;
    return values[last];
  }

  bool jumps_at(std::size_t node) const {
    const std::size_t next = node + 1 < node_begin.size() ? node_begin[node + 1] : values.size();
    return next - node_begin[node] > 1;
  }

  const Vector& back() const { return values.back(); }
};

/// Forward state trajectory.
struct Trajectory : SampledPath<StateVector> {
  const std::vector<StateVector>& states() const noexcept { return values; }
};

/// Backward costate trajectory on the same grid.
struct AdjointTrajectory : SampledPath<AdjointVector> {};

}  // namespace epictrl
