#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epictrl/model.hpp"
#include "epictrl/objective.hpp"
#include "epictrl/scenarios.hpp"

namespace epictrl::testing {

inline StateVector outbreak_state() { return StateVector(8000.0, 1000.0, 500.0, 500.0, 0.0, 0.0, {0.0, 0.0}); }

inline ModelParams covid() { return preset("covid19").params; }

inline CostWeights zero_weights(std::size_t doses) {
  CostWeights w;
  w.omega = {0.0, 0.0, 0.0, 0.0};
  w.sigma0 = 50.0;
  w.sigma.assign(doses, 50.0);
  w.terminal = TerminalCost::none();
  return w;
}

/// Random parameter set satisfying every model invariant. beta is scaled so
/// beta * N0 stays at a realistic order of magnitude.
inline ModelParams random_params(std::mt19937_64& rng, std::size_t doses, double n0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModelParams m;
  m.beta = (0.05 + 2.0 * unit(rng)) / n0;
  m.epsilon = 0.5 * unit(rng);
  m.q = unit(rng);
  m.mu = unit(rng);
  m.k = 0.05 + 0.95 * unit(rng);
  m.z = unit(rng);
  m.p = unit(rng);
  m.eta = 0.05 + 0.95 * unit(rng);
  m.alpha = 0.5 + 0.5 * unit(rng);
  m.f = 0.05 + 0.95 * unit(rng);
  m.gamma.resize(doses);
  m.delta.resize(doses);
  double g = 0.2 + 0.8 * unit(rng);
  for (std::size_t i = 0; i < doses; ++i) {
    m.gamma[i] = g;
    g *= unit(rng);
  }
  double d = 0.01 * unit(rng);
  for (std::size_t i = 0; i < doses; ++i) {
    m.delta[i] = std::min(d, m.gamma[i]);
    d *= unit(rng);
  }
  return m;
}

inline StateVector random_state(std::mt19937_64& rng, std::size_t doses, double scale) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(doses);
  for (auto& x : v) x = scale * unit(rng);
  return StateVector(scale * unit(rng), scale * unit(rng), scale * unit(rng), scale * unit(rng), scale * unit(rng),
                     scale * unit(rng), v);
}

inline AdjointVector random_adjoint(std::mt19937_64& rng, std::size_t doses, double scale) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::vector<double> values(kFixedCompartments + doses);
  for (auto& x : values) x = scale * sym(rng);
  return AdjointVector::from_values(values);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("epictrl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace epictrl::testing
