#pragma once

// VS-EIAR compartment model: state layout, parameters, the controlled vector
// field, impulse jumps and scalar diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epictrl/errors.hpp"

namespace epictrl {

enum class Compartment : std::size_t { S = 0, E = 1, A = 2, I = 3, R = 4, D = 5 };

inline constexpr std::size_t kFixedCompartments = 6;

/// Flat storage for the n+6 quantities attached to (S, E, A, I, R, D, V1..Vn).
///
/// The tag distinguishes states from costates so the two cannot be mixed up
/// while sharing one layout.
template <typename Tag>
class CompartmentVector {
 public:
  CompartmentVector() = default;

  explicit CompartmentVector(std::size_t doses) : values_(kFixedCompartments + doses, 0.0) {}

  CompartmentVector(double s, double e, double a, double i, double r, double d, const std::vector<double>& doses)
      : values_{s, e, a, i, r, d} {
    values_.insert(values_.end(), doses.begin(), doses.end());
  }

  static CompartmentVector from_values(std::vector<double> values) {
    if (values.size() <= kFixedCompartments) {
      throw DimensionError("compartment vector needs at least one dose compartment");
    }
    CompartmentVector out;
    out.values_ = std::move(values);
    return out;
  }

  std::size_t doses() const noexcept { return values_.empty() ? 0 : values_.size() - kFixedCompartments; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](Compartment c) const { return values_[static_cast<std::size_t>(c)]; }
  double& operator[](Compartment c) { return values_[static_cast<std::size_t>(c)]; }

  /// Dose compartment i, zero based (V1 is dose(0)).
  double dose(std::size_t i) const { return values_[kFixedCompartments + i]; }
  double& dose(std::size_t i) { return values_[kFixedCompartments + i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double S() const { return (*this)[Compartment::S]; }
  double E() const { return (*this)[Compartment::E]; }
  double A() const { return (*this)[Compartment::A]; }
  double I() const { return (*this)[Compartment::I]; }
  double R() const { return (*this)[Compartment::R]; }
  double D() const { return (*this)[Compartment::D]; }

  bool operator==(const CompartmentVector&) const = default;

 private:
  std::vector<double> values_;
};

struct StateTag {};
struct CostateTag {};

/// Compartment populations at one instant.
using StateVector = CompartmentVector<StateTag>;
/// Time derivative of a StateVector (persons per day).
using StateDerivative = CompartmentVector<StateTag>;
/// Costates p1..p6 (in compartment order) followed by q1..qn.
using AdjointVector = CompartmentVector<CostateTag>;

struct ModelParams {
  double beta = 0.0;     // transmission coefficient
  double epsilon = 0.0;  // relative infectiousness of E
  double q = 0.0;        // infectiousness reduction of I is (1 - q)
  double mu = 0.0;       // relative infectiousness of A
  double k = 0.0;        // exposed progression rate
  double z = 0.0;        // symptomatic fraction
  double p = 0.0;        // asymptomatic recovery fraction
  double eta = 0.0;      // asymptomatic exit rate
  double alpha = 0.0;    // infected survival fraction
  double f = 0.0;        // infected exit rate
  std::vector<double> gamma;  // dose uptake multipliers on v
  std::vector<double> delta;  // breakthrough rates
  /// Also route the last dose compartment to E at rate delta_n.
  bool include_delta_n = false;

  std::size_t doses() const noexcept { return gamma.size(); }
  double max_vaccination() const { return 1.0 / gamma.front(); }

  bool operator==(const ModelParams&) const = default;
};

/// Every invariant the parameter set breaks, in a stable order.
inline std::vector<std::string> parameter_violations(const ModelParams& params) {
  std::vector<std::string> out;
  const auto unit = [&](double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) out.push_back(std::string(name) + " out of [0,1]");
  };
  unit(params.beta, "beta");
  unit(params.eta, "eta");
  unit(params.p, "p");
  unit(params.k, "k");
  unit(params.z, "z");
  unit(params.alpha, "alpha");
  unit(params.f, "f");
  unit(params.q, "q");
  if (!(params.epsilon >= 0.0)) out.emplace_back("epsilon negative");
  if (!(params.mu >= 0.0)) out.emplace_back("mu negative");

  const auto& g = params.gamma;
  const auto& d = params.delta;
  if (g.empty()) {
    out.emplace_back("gamma must have at least one dose");
  } else if (!(g.front() > 0.0)) {
    out.emplace_back("gamma_1 must be positive");
  }
  if (d.size() != g.size()) out.emplace_back("delta length differs from gamma length");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0.0)) out.emplace_back("gamma negative");
    if (i > 0 && g[i] > g[i - 1]) {
      out.emplace_back("gamma not non-increasing");
      break;
    }
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] >= 0.0)) out.emplace_back("delta negative");
    if (i > 0 && d[i] > d[i - 1]) {
      out.emplace_back("delta not non-increasing");
      break;
    }
  }
  for (std::size_t i = 0; i < std::min(g.size(), d.size()); ++i) {
    if (g[i] < d[i]) {
      out.emplace_back("gamma_i < delta_i for some dose");
      break;
    }
  }
  return out;
}

inline std::vector<std::string> state_violations(const StateVector& state) {
  std::vector<std::string> out;
  if (state.doses() == 0) out.emplace_back("state needs at least one dose compartment");
  for (double x : state.values()) {
    if (!(x >= 0.0)) {
      out.emplace_back("negative or NaN compartment in state");
      break;
    }
  }
  return out;
}

inline void require_same_doses(const StateVector& state, const ModelParams& params) {
  if (state.doses() != params.doses() || params.delta.size() != params.doses() || params.doses() == 0) {
    throw DimensionError("state has " + std::to_string(state.doses()) + " dose compartments, parameters have " +
                         std::to_string(params.gamma.size()) + " gamma / " + std::to_string(params.delta.size()) +
                         " delta entries");
  }
}

/// Force of infection per unit beta: epsilon E + (1 - q) I + mu A.
template <typename Tag>
double transmissibility_force(const CompartmentVector<Tag>& state, const ModelParams& params) {
  return params.epsilon * state.E() + (1.0 - params.q) * state.I() + params.mu * state.A();
}

/// Whether dose compartment i (zero based) leaks into E.
inline bool has_breakthrough(const ModelParams& params, std::size_t i) {
  return i + 1 < params.doses() || params.include_delta_n;
}

/// Right-hand side of the controlled system, written into `out` (size n+6).
inline void vector_field(const StateVector& state, double v, double u, const ModelParams& params,
                         std::span<double> out) {
  require_same_doses(state, params);
  const std::size_t n = params.doses();
  const double S = state.S();
  const double E = state.E();
  const double A = state.A();
  const double I = state.I();
  const double infection = params.beta * transmissibility_force(state, params) * S;

  double breakthrough = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double previous = i == 0 ? S : state.dose(i - 1);
    const double here = state.dose(i);
    const double inflow = params.gamma[i] * v * previous;
    const double promoted = i + 1 < n ? params.gamma[i + 1] * v * here : 0.0;
    const double leaked = has_breakthrough(params, i) ? params.delta[i] * here : 0.0;
    breakthrough += leaked;
    out[kFixedCompartments + i] = inflow - promoted - leaked;
  }

  out[0] = -infection - params.gamma[0] * v * S;
  out[1] = infection - params.k * E + breakthrough;
  out[2] = (1.0 - params.z) * params.k * E - params.eta * A;
  out[3] = params.z * params.k * E + (1.0 - params.p) * params.eta * A - params.f * I - u * I;
  out[4] = params.alpha * params.f * I + u * I + params.p * params.eta * A;
  out[5] = (1.0 - params.alpha) * params.f * I;
}

inline StateDerivative vector_field(const StateVector& state, double v, double u, const ModelParams& params) {
  StateDerivative out(state.doses());
  vector_field(state, v, u, params, out.values());
  return out;
}

/// Per-compartment arrival rates (S, E, A, I) of one immigration impulse.
using ImpulseRates = std::array<double, 4>;

/// Instantaneous multiplicative jump X <- (1 + lambda) X on S, E, A and I.
inline StateVector apply_impulse(StateVector state, const ImpulseRates& lambda) {
  for (std::size_t c = 0; c < lambda.size(); ++c) {
    state.values()[c] *= 1.0 + lambda[c];
  }
  return state;
}

/// N = S + E + A + I + R + sum V_i. Deceased are not counted.
inline double total_population(const StateVector& state) {
  double n = 0.0;
  const auto x = state.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i != static_cast<std::size_t>(Compartment::D)) n += x[i];
  }
  return n;
}

/// beta N0 [z / (alpha f) + mu (1 - z) / eta] for the uncontrolled model.
inline double basic_reproduction_number(const ModelParams& params, double initial_population) {
  const double removal = params.alpha * params.f;
  if (removal == 0.0 || params.eta == 0.0) {
    throw DegenerateParameterError("basic reproduction number needs alpha*f > 0 and eta > 0");
  }
  return params.beta * initial_population * (params.z / removal + params.mu * (1.0 - params.z) / params.eta);
}

}  // namespace epictrl
