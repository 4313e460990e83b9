#pragma once

// Cost functional, Hamiltonian, costate dynamics and the pointwise control
// law obtained from minimizing the Hamiltonian over the control box.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epictrl/controls.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/model.hpp"
#include "epictrl/trajectory.hpp"

namespace epictrl {

/// Terminal penalty M(tau), one of c*tau, c*tau^2 or c*(exp(a*tau) - 1).
struct TerminalCost {
  enum class Kind { linear, quadratic, exponential };

  Kind kind = Kind::quadratic;
  double c = 1.0;
  double a = 0.0;  // exponential rate, unused otherwise

  double value(double tau) const {
    switch (kind) {
      case Kind::linear: return c * tau;
      case Kind::quadratic: return c * tau * tau;
      case Kind::exponential: return c * std::expm1(a * tau);
    }
    return 0.0;
  }

  double derivative(double tau) const {
    switch (kind) {
      case Kind::linear: return c;
      case Kind::quadratic: return 2.0 * c * tau;
      case Kind::exponential: return c * a * std::exp(a * tau);
    }
    return 0.0;
  }

  static TerminalCost none() { return {Kind::quadratic, 0.0, 0.0}; }

  bool operator==(const TerminalCost&) const = default;
};

inline const char* to_string(TerminalCost::Kind kind) {
  switch (kind) {
    case TerminalCost::Kind::linear: return "linear";
    case TerminalCost::Kind::quadratic: return "quadratic";
    case TerminalCost::Kind::exponential: return "exponential";
  }
  return "?";
}

struct CostWeights {
  std::array<double, 4> omega{1.0, 1.0, 1.0, 1.0};  // S, E, A, I
  double sigma0 = 50.0;                             // treatment gain
  std::vector<double> sigma;                        // per-dose vaccination gains
  TerminalCost terminal;

  bool operator==(const CostWeights&) const = default;

  /// sum_i sigma_i gamma_i^2, the curvature of the vaccination cost.
  double vaccination_gain(const ModelParams& params) const {
    double total = 0.0;
    for (std::size_t i = 0; i < sigma.size() && i < params.gamma.size(); ++i) {
      total += sigma[i] * params.gamma[i] * params.gamma[i];
    }
    return total;
  }
};

inline std::vector<std::string> weight_violations(const CostWeights& weights, const ModelParams& params) {
  std::vector<std::string> out;
  for (double w : weights.omega) {
    if (!(w >= 0.0)) {
      out.emplace_back("omega weight negative");
      break;
    }
  }
  if (!(weights.sigma0 > 0.0)) out.emplace_back("sigma0 must be positive");
  if (weights.sigma.size() != params.gamma.size()) out.emplace_back("sigma length differs from gamma length");
  for (double s : weights.sigma) {
    if (!(s >= 0.0)) {
      out.emplace_back("sigma weight negative");
      break;
    }
  }
  if (!(weights.vaccination_gain(params) > 0.0)) out.emplace_back("sum sigma_i gamma_i^2 must be positive");
  const auto& m = weights.terminal;
  if (!(m.c >= 0.0)) out.emplace_back("terminal cost coefficient negative");
  if (m.kind == TerminalCost::Kind::exponential && !(m.a > 0.0)) {
    out.emplace_back("exponential terminal cost needs a > 0");
  }
  return out;
}

/// K(S,E,A,I) + sigma0/2 u^2 + (sum sigma_i gamma_i^2)/2 v^2.
inline double running_cost(const StateVector& state, double u, double v, const CostWeights& weights,
                           const ModelParams& params) {
  const auto& w = weights.omega;
  const double epidemic = w[0] * state.S() + w[1] * state.E() + w[2] * state.A() + w[3] * state.I();
  return epidemic + 0.5 * weights.sigma0 * u * u + 0.5 * weights.vaccination_gain(params) * v * v;
}

/// Trapezoidal J over the grid plus M(tau).
///
/// The epidemic term uses node samples (post-jump value on the left of an
/// interval, pre-jump on the right). The control term is integrated per
/// interval consistently with the control interpolation, so held controls
/// are integrated exactly.
inline double total_cost(const Trajectory& traj, const ControlSignal& controls, const CostWeights& weights,
                         const ModelParams& params, double tau) {
  const std::size_t nodes = traj.nodes();
  if (nodes < 2 || controls.size() != nodes) {
    throw GridMismatchError("trajectory has " + std::to_string(nodes) + " nodes, controls have " +
                            std::to_string(controls.size()) + " samples");
  }
  const auto& w = weights.omega;
  const auto epidemic = [&](const StateVector& x) {
    return w[0] * x.S() + w[1] * x.E() + w[2] * x.A() + w[3] * x.I();
  };
  const double vaccination_gain = weights.vaccination_gain(params);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < nodes; ++i) {
    const double h = controls.grid[i + 1] - controls.grid[i];
    const auto left = controls.on_interval(i, 0.0);
    const auto right = controls.on_interval(i, 1.0);
    const double control_rate = 0.5 * weights.sigma0 * 0.5 * (left.u * left.u + right.u * right.u) +
                                0.5 * vaccination_gain * 0.5 * (left.v * left.v + right.v * right.v);
    integral += h * (0.5 * (epidemic(traj.after(i)) + epidemic(traj.before(i + 1))) + control_rate);
  }
  return integral + weights.terminal.value(tau);
}

/// Costate derivative dP/dt = -dH/dX, written into `out`.
///
/// For n >= 3 the middle dose equations include the coupling
/// -gamma_{i+1} v q_{i+1}, which vanishes for two doses since q_n stays 0.
inline void adjoint_rhs(const AdjointVector& adjoint, const StateVector& state, double u, double v,
                        const ModelParams& params, const CostWeights& weights, std::span<double> out) {
  const std::size_t n = params.doses();
  const double beta = params.beta;
  const double S = state.S();
  const double force = transmissibility_force(state, params);
  const double p1 = adjoint[Compartment::S];
  const double p2 = adjoint[Compartment::E];
  const double p3 = adjoint[Compartment::A];
  const double p4 = adjoint[Compartment::I];
  const double p5 = adjoint[Compartment::R];
  const double p6 = adjoint[Compartment::D];
  const double q1 = adjoint.dose(0);
  const auto& w = weights.omega;
  const double infected_gap = p1 - p2;

  out[0] = beta * force * infected_gap + params.gamma[0] * v * (p1 - q1) - w[0];
  out[1] = beta * params.epsilon * S * infected_gap + params.k * p2 - (1.0 - params.z) * params.k * p3 -
           params.z * params.k * p4 - w[1];
  out[2] = beta * params.mu * S * infected_gap + params.eta * p3 - (1.0 - params.p) * params.eta * p4 -
           params.p * params.eta * p5 - w[2];
  out[3] = beta * (1.0 - params.q) * S * infected_gap + u * (p4 - p5) + params.f * (p4 - params.alpha * p5) -
           (1.0 - params.alpha) * params.f * p6 - w[3];
  out[4] = 0.0;
  out[5] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double qi = adjoint.dose(i);
    double rate = 0.0;
    if (i + 1 < n) rate += params.gamma[i + 1] * v * (qi - adjoint.dose(i + 1));
    if (has_breakthrough(params, i)) rate += params.delta[i] * (qi - p2);
    out[kFixedCompartments + i] = rate;
  }
}

inline AdjointVector adjoint_rhs(const AdjointVector& adjoint, const StateVector& state, double u, double v,
                                 const ModelParams& params, const CostWeights& weights) {
  AdjointVector out(adjoint.doses());
  adjoint_rhs(adjoint, state, u, v, params, weights, out.values());
  return out;
}

/// H = running cost + <(p, q), f(x, u, v)>.
inline double hamiltonian(const StateVector& state, const AdjointVector& adjoint, double u, double v,
                          const ModelParams& params, const CostWeights& weights) {
  const auto rhs = vector_field(state, v, u, params);
  double h = running_cost(state, u, v, weights, params);
  const auto lam = adjoint.values();
  const auto dx = rhs.values();
  for (std::size_t j = 0; j < dx.size(); ++j) h += lam[j] * dx[j];
  return h;
}

/// Vaccination switching function W: minus the costate-weighted sensitivity
/// of the dynamics to v.
inline double vaccination_switch(const StateVector& state, const AdjointVector& adjoint, const ModelParams& params) {
  const std::size_t n = params.doses();
  double w = params.gamma[0] * state.S() * (adjoint[Compartment::S] - adjoint.dose(0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w += params.gamma[i + 1] * state.dose(i) * (adjoint.dose(i) - adjoint.dose(i + 1));
  }
  return w;
}

/// Treatment switching function I (p4 - p5).
inline double treatment_switch(const StateVector& state, const AdjointVector& adjoint) {
  return state.I() * (adjoint[Compartment::I] - adjoint[Compartment::R]);
}

/// dH/du and dH/dv at the given point. Both are affine in the controls.
inline ControlValue hamiltonian_control_gradient(const StateVector& state, const AdjointVector& adjoint, double u,
                                                 double v, const ModelParams& params, const CostWeights& weights) {
  return {weights.vaccination_gain(params) * v - vaccination_switch(state, adjoint, params),
          weights.sigma0 * u - treatment_switch(state, adjoint)};
}

/// Pointwise minimizer of H over the control box.
inline ControlValue control_update(const StateVector& state, const AdjointVector& adjoint, const ModelParams& params,
                                   const CostWeights& weights) {
  const double vaccination_gain = weights.vaccination_gain(params);
  if (!(weights.sigma0 > 0.0) || !(vaccination_gain > 0.0)) {
    throw DegenerateWeightsError("control update needs sigma0 > 0 and sum sigma_i gamma_i^2 > 0");
  }
  const double u = clamp_control(treatment_switch(state, adjoint) / weights.sigma0, 0.0, 1.0);
  const double v =
      clamp_control(vaccination_switch(state, adjoint, params) / vaccination_gain, 0.0, params.max_vaccination());
  return {v, u};
}

enum class ControlChannel { vaccination, treatment };

/// Adjoint prediction of dJ/d(epsilon) when control sample `node` is raised by
/// epsilon: the integral of the nodal hat function against dH/du (or dH/dv).
/// Each adjacent interval is integrated with Simpson's rule, mid-interval
/// values interpolated linearly.
inline double adjoint_gradient(const Trajectory& traj, const AdjointTrajectory& adjoint,
                               const ControlSignal& controls, const ModelParams& params, const CostWeights& weights,
                               std::size_t node, ControlChannel channel) {
  if (traj.nodes() != controls.size() || adjoint.nodes() != controls.size() || node >= controls.size()) {
    throw GridMismatchError("adjoint gradient: trajectories, controls and node index disagree");
  }
  const auto partial = [&](const StateVector& x, const AdjointVector& lam, const ControlValue& c) {
    const auto g = hamiltonian_control_gradient(x, lam, c.u, c.v, params, weights);
    return channel == ControlChannel::treatment ? g.u : g.v;
  };
  const auto midpoint = [](const auto& a, const auto& b) {
    auto m = a;
    auto mv = m.values();
    const auto bv = b.values();
    for (std::size_t j = 0; j < mv.size(); ++j) mv[j] = 0.5 * (mv[j] + bv[j]);
    return m;
  };
  double total = 0.0;
  if (node > 0) {
    const std::size_t i = node - 1;
    const double h = controls.grid[node] - controls.grid[i];
    const double g_mid = partial(midpoint(traj.after(i), traj.before(node)),
                                 midpoint(adjoint.after(i), adjoint.before(node)), controls.on_interval(i, 0.5));
    const double g_end = partial(traj.before(node), adjoint.before(node), controls.on_interval(i, 1.0));
    total += h / 6.0 * (2.0 * g_mid + g_end);
  }
  if (node + 1 < controls.size()) {
    const std::size_t i = node;
    const double h = controls.grid[i + 1] - controls.grid[i];
    const double g_start = partial(traj.after(i), adjoint.after(i), controls.on_interval(i, 0.0));
    const double g_mid = partial(midpoint(traj.after(i), traj.before(i + 1)),
                                 midpoint(adjoint.after(i), adjoint.before(i + 1)), controls.on_interval(i, 0.5));
    total += h / 6.0 * (g_start + 2.0 * g_mid);
  }
  return total;
}

}  // namespace epictrl
