#pragma once

// Disease presets and the JSON run configuration.

#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "epictrl/errors.hpp"
#include "epictrl/integrator.hpp"
#include "epictrl/model.hpp"
#include "epictrl/objective.hpp"
#include "epictrl/sweep.hpp"
#include "epictrl/trajectory.hpp"

namespace epictrl {

struct Preset {
  ModelParams params;
  StateVector initial;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"covid19", "ebola", "influenza"};
  return names;
}

/// Parameters and initial state for a named disease.
///
/// Ebola and influenza only override the progression/outcome rates; beta, the
/// dose rates and the initial state are the covid19 values.
inline Preset preset(std::string_view disease) {
  Preset out;
  auto& m = out.params;
  m.beta = 5e-4;
  m.epsilon = 0.0;
  m.q = 0.5;
  m.mu = 1.0;
  m.gamma = {1.0, 1.0};
  m.delta = {5e-4, 0.0};
  out.initial = StateVector(8000.0, 1000.0, 500.0, 500.0, 0.0, 0.0, {0.0, 0.0});

  if (disease == "covid19") {
    m.p = 0.02;
    m.eta = 0.3;
    m.z = 0.1;
    m.alpha = 0.995;
    m.k = 0.54;
    m.f = 0.3;
  } else if (disease == "ebola") {
    m.z = 0.76;
    m.eta = 0.178;
    m.k = 0.0023;
    m.alpha = 0.26;
    m.p = 0.02;
    m.f = 0.178;
  } else if (disease == "influenza") {
    m.z = 0.667;
    m.eta = 0.244;
    m.k = 0.526;
    m.alpha = 0.98;
    m.p = 0.9;
    m.f = 0.244;
  } else {
    throw UnknownPresetError("unknown disease preset '" + std::string(disease) + "'");
  }
  return out;
}

/// omega = 1, sigma_0 = sigma_i = 50, M(tau) = tau^2.
inline CostWeights default_weights(std::size_t doses) {
  CostWeights w;
  w.omega = {1.0, 1.0, 1.0, 1.0};
  w.sigma0 = 50.0;
  w.sigma.assign(doses, 50.0);
  w.terminal = {TerminalCost::Kind::quadratic, 1.0, 0.0};
  return w;
}

/// Weekly impulses with lambda = 0.05 on S, E, A and I inside (0, tau).
inline ImpulseSchedule default_schedule(double tau) {
  ImpulseSchedule schedule;
  for (double t = 7.0; t < tau; t += 7.0) schedule.events.push_back({t, {0.05, 0.05, 0.05, 0.05}});
  return schedule;
}

struct GridSpec {
  double tau = 35.0;
  double step = 0.01;

  TimeGrid make() const { return TimeGrid::make(tau, step); }

  bool operator==(const GridSpec&) const = default;
};

struct RunConfig {
  ModelParams params;
  StateVector initial;
  CostWeights weights;
  GridSpec grid;
  std::optional<ImpulseSchedule> schedule;
  SweepOptions solver;

  ImpulseSchedule impulses() const { return schedule.value_or(ImpulseSchedule{}); }

  bool operator==(const RunConfig&) const = default;
};

inline RunConfig default_config(std::string_view disease) {
  auto base = preset(disease);
  RunConfig cfg;
  cfg.weights = default_weights(base.params.doses());
  cfg.params = std::move(base.params);
  cfg.initial = std::move(base.initial);
  return cfg;
}

/// Every violated invariant of a configuration; empty means valid.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
  auto out = parameter_violations(cfg.params);
  const auto append = [&out](const std::vector<std::string>& more) { out.insert(out.end(), more.begin(), more.end()); };
  append(state_violations(cfg.initial));
  if (cfg.initial.doses() != cfg.params.gamma.size()) out.emplace_back("initial dose count differs from gamma length");
  append(weight_violations(cfg.weights, cfg.params));
  if (!(cfg.grid.step > 0.0)) out.emplace_back("grid step must be positive");
  if (!(cfg.grid.tau > 0.0)) out.emplace_back("grid tau must be positive");
  if (cfg.grid.step > 0.0 && cfg.grid.tau > 0.0 && cfg.grid.step > cfg.grid.tau) {
    out.emplace_back("grid step larger than tau");
  }
  if (cfg.schedule) {
    append(schedule_violations(*cfg.schedule, cfg.grid.tau));
    if (cfg.grid.step > 0.0 && cfg.grid.tau > 0.0 && cfg.grid.step <= cfg.grid.tau) {
      const auto grid = cfg.grid.make();
      for (const auto& e : cfg.schedule->events) {
        if (!grid.node_of(e.time)) {
          out.emplace_back("impulse time " + std::to_string(e.time) + " not on the grid");
        }
      }
    }
  }
  append(sweep_option_violations(cfg.solver));
  if (!(cfg.solver.forward.negative_tolerance >= 0.0)) out.emplace_back("negative tolerance must be non-negative");
  return out;
}

namespace detail {

using nlohmann::json;

/// Collects every structural problem in a config document before failing.
class ConfigReader {
 public:
  void fail(const std::string& path, const std::string& what) { problems_.push_back(path + ": " + what); }

  const std::vector<std::string>& problems() const { return problems_; }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  bool object(const json& node, const std::string& path) {
    if (!node.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    return true;
  }

  void number(const json& obj, const std::string& path, const char* key, double& out, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing");
      return;
    }
    const auto& node = obj.at(key);
    if (!node.is_number()) {
      fail(join(path, key), "expected a number");
      return;
    }
    out = node.get<double>();
  }

  void count(const json& obj, const std::string& path, const char* key, std::size_t& out) {
    if (!obj.contains(key)) return;
    const auto& node = obj.at(key);
    if (!node.is_number_integer() || node.get<long long>() < 0) {
      fail(join(path, key), "expected a non-negative integer");
      return;
    }
    out = node.get<std::size_t>();
  }

  void boolean(const json& obj, const std::string& path, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    const auto& node = obj.at(key);
    if (!node.is_boolean()) {
      fail(join(path, key), "expected true or false");
      return;
    }
    out = node.get<bool>();
  }

  void numbers(const json& obj, const std::string& path, const char* key, std::vector<double>& out, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing");
      return;
    }
    const auto& node = obj.at(key);
    if (!node.is_array()) {
      fail(join(path, key), "expected an array of numbers");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].is_number()) {
        fail(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
        continue;
      }
      out.push_back(node[i].get<double>());
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string> problems_;
};

inline void read_params(ConfigReader& r, const json& node, ModelParams& m) {
  if (node.is_string()) {
    try {
      const bool delta_n = m.include_delta_n;
      m = preset(node.get<std::string>()).params;
      m.include_delta_n = delta_n;
    } catch (const UnknownPresetError& e) {
      r.fail("params", e.what());
    }
    return;
  }
  if (!r.object(node, "params")) return;
  r.only_keys(node, "params",
              {"beta", "epsilon", "q", "mu", "k", "z", "p", "eta", "alpha", "f", "gamma", "delta"});
  r.number(node, "params", "beta", m.beta, true);
  r.number(node, "params", "epsilon", m.epsilon, true);
  r.number(node, "params", "q", m.q, true);
  r.number(node, "params", "mu", m.mu, true);
  r.number(node, "params", "k", m.k, true);
  r.number(node, "params", "z", m.z, true);
  r.number(node, "params", "p", m.p, true);
  r.number(node, "params", "eta", m.eta, true);
  r.number(node, "params", "alpha", m.alpha, true);
  r.number(node, "params", "f", m.f, true);
  r.numbers(node, "params", "gamma", m.gamma, true);
  r.numbers(node, "params", "delta", m.delta, true);
}

inline void read_initial(ConfigReader& r, const json& node, StateVector& x) {
  if (node.is_string()) {
    try {
      x = preset(node.get<std::string>()).initial;
    } catch (const UnknownPresetError& e) {
      r.fail("initial", e.what());
    }
    return;
  }
  if (!r.object(node, "initial")) return;
  r.only_keys(node, "initial", {"S", "E", "A", "I", "R", "D", "V"});
  std::array<double, kFixedCompartments> fixed{};
  const char* names[] = {"S", "E", "A", "I", "R", "D"};
  for (std::size_t c = 0; c < fixed.size(); ++c) r.number(node, "initial", names[c], fixed[c], true);
  std::vector<double> doses;
  r.numbers(node, "initial", "V", doses, true);
  if (doses.empty()) {
    r.fail("initial.V", "needs at least one dose compartment");
    return;
  }
  x = StateVector(fixed[0], fixed[1], fixed[2], fixed[3], fixed[4], fixed[5], doses);
}

inline void read_weights(ConfigReader& r, const json& node, CostWeights& w) {
  if (!r.object(node, "weights")) return;
  r.only_keys(node, "weights", {"omega", "sigma0", "sigma", "terminal"});
  if (node.contains("omega")) {
    std::vector<double> omega;
    r.numbers(node, "weights", "omega", omega, true);
    if (omega.size() == 4) {
      std::copy(omega.begin(), omega.end(), w.omega.begin());
    } else {
      r.fail("weights.omega", "expected exactly 4 weights");
    }
  }
  r.number(node, "weights", "sigma0", w.sigma0, false);
  r.numbers(node, "weights", "sigma", w.sigma, false);
  if (node.contains("terminal")) {
    const auto& t = node.at("terminal");
    if (!r.object(t, "weights.terminal")) return;
    r.only_keys(t, "weights.terminal", {"kind", "c", "a"});
    if (t.contains("kind")) {
      const auto& kind = t.at("kind");
      if (kind == "linear") {
        w.terminal.kind = TerminalCost::Kind::linear;
      } else if (kind == "quadratic") {
        w.terminal.kind = TerminalCost::Kind::quadratic;
      } else if (kind == "exponential") {
        w.terminal.kind = TerminalCost::Kind::exponential;
      } else {
        r.fail("weights.terminal.kind", "expected linear, quadratic or exponential");
      }
    }
    r.number(t, "weights.terminal", "c", w.terminal.c, false);
    r.number(t, "weights.terminal", "a", w.terminal.a, false);
  }
}

inline void read_schedule(ConfigReader& r, const json& node, std::optional<ImpulseSchedule>& out) {
  if (node.is_null()) {
    out.reset();
    return;
  }
  if (!r.object(node, "schedule")) return;
  r.only_keys(node, "schedule", {"events"});
  ImpulseSchedule schedule;
  if (node.contains("events")) {
    const auto& events = node.at("events");
    if (!events.is_array()) {
      r.fail("schedule.events", "expected an array");
    } else {
      for (std::size_t k = 0; k < events.size(); ++k) {
        const std::string path = "schedule.events[" + std::to_string(k) + "]";
        if (!r.object(events[k], path)) continue;
        r.only_keys(events[k], path, {"t", "lambda"});
        ImpulseEvent e;
        r.number(events[k], path, "t", e.time, true);
        std::vector<double> lambda;
        r.numbers(events[k], path, "lambda", lambda, true);
        if (lambda.size() == 4) {
          std::copy(lambda.begin(), lambda.end(), e.lambda.begin());
        } else {
          r.fail(path + ".lambda", "expected 4 rates (S, E, A, I)");
        }
        schedule.events.push_back(e);
      }
    }
  }
  out = std::move(schedule);
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

}  // namespace detail

/// Parse a configuration document. Structural problems (syntax, unknown keys,
/// wrong types, missing fields) are all reported in one ParseError; semantic
/// invariants are left to validate_config.
inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }

  detail::ConfigReader r;
  RunConfig cfg;
  if (!r.object(doc, "<root>")) throw ParseError(source + ": " + r.problems().front());
  r.only_keys(doc, "", {"params", "initial", "weights", "grid", "schedule", "solver", "flags"});

  if (doc.contains("flags")) {
    const auto& flags = doc.at("flags");
    if (r.object(flags, "flags")) {
      r.only_keys(flags, "flags", {"adjoint_impulse", "include_delta_n"});
      r.boolean(flags, "flags", "include_delta_n", cfg.params.include_delta_n);
      if (flags.contains("adjoint_impulse")) {
        const auto& mode = flags.at("adjoint_impulse");
        if (mode == "multiplicative") {
          cfg.solver.adjoint.impulse = AdjointImpulse::multiplicative;
        } else if (mode == "literal") {
          cfg.solver.adjoint.impulse = AdjointImpulse::literal;
        } else {
          r.fail("flags.adjoint_impulse", "expected multiplicative or literal");
        }
      }
    }
  }

  if (doc.contains("params")) {
    detail::read_params(r, doc.at("params"), cfg.params);
  } else {
    r.fail("params", "missing");
  }
  if (doc.contains("initial")) {
    detail::read_initial(r, doc.at("initial"), cfg.initial);
  } else {
    r.fail("initial", "missing");
  }
  cfg.weights = default_weights(cfg.params.doses());
  if (doc.contains("weights")) detail::read_weights(r, doc.at("weights"), cfg.weights);
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    if (r.object(g, "grid")) {
      r.only_keys(g, "grid", {"tau", "step"});
      r.number(g, "grid", "tau", cfg.grid.tau, false);
      r.number(g, "grid", "step", cfg.grid.step, false);
    }
  }
  if (doc.contains("schedule")) detail::read_schedule(r, doc.at("schedule"), cfg.schedule);
  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    if (r.object(s, "solver")) {
      r.only_keys(s, "solver", {"relaxation", "tolerance", "max_iterations"});
      r.number(s, "solver", "relaxation", cfg.solver.relaxation, false);
      r.number(s, "solver", "tolerance", cfg.solver.tolerance, false);
      r.count(s, "solver", "max_iterations", cfg.solver.max_iterations);
    }
  }

  if (!r.problems().empty()) {
    std::string message = source + ": malformed configuration";
    for (const auto& p : r.problems()) message += "\n  - " + p;
    throw ParseError(message);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

/// load_config followed by validate_config; throws ValidationError listing
/// every violation.
inline RunConfig load_valid_config(const std::string& path) {
  auto cfg = load_config(path);
  if (auto violations = validate_config(cfg); !violations.empty()) throw ValidationError(std::move(violations));
  return cfg;
}

/// Fully explicit JSON form of a configuration (presets are expanded).
inline nlohmann::json config_to_json(const RunConfig& cfg) {
  using nlohmann::json;
  const auto& m = cfg.params;
  json doc;
  doc["params"] = {{"beta", m.beta}, {"epsilon", m.epsilon}, {"q", m.q},     {"mu", m.mu},
                   {"k", m.k},       {"z", m.z},             {"p", m.p},     {"eta", m.eta},
                   {"alpha", m.alpha}, {"f", m.f},           {"gamma", m.gamma}, {"delta", m.delta}};
  const auto& x = cfg.initial;
  std::vector<double> doses;
  for (std::size_t i = 0; i < x.doses(); ++i) doses.push_back(x.dose(i));
  doc["initial"] = {{"S", x.S()}, {"E", x.E()}, {"A", x.A()}, {"I", x.I()},
                    {"R", x.R()}, {"D", x.D()}, {"V", doses}};
  const auto& w = cfg.weights;
  doc["weights"] = {{"omega", w.omega},
                    {"sigma0", w.sigma0},
                    {"sigma", w.sigma},
                    {"terminal", {{"kind", to_string(w.terminal.kind)}, {"c", w.terminal.c}, {"a", w.terminal.a}}}};
  doc["grid"] = {{"tau", cfg.grid.tau}, {"step", cfg.grid.step}};
  if (cfg.schedule) {
    json events = json::array();
    for (const auto& e : cfg.schedule->events) events.push_back({{"t", e.time}, {"lambda", e.lambda}});
    doc["schedule"] = {{"events", events}};
  } else {
    doc["schedule"] = nullptr;
  }
  doc["solver"] = {{"relaxation", cfg.solver.relaxation},
                   {"tolerance", cfg.solver.tolerance},
                   {"max_iterations", cfg.solver.max_iterations}};
  doc["flags"] = {
      {"adjoint_impulse",
       cfg.solver.adjoint.impulse == AdjointImpulse::multiplicative ? "multiplicative" : "literal"},
      {"include_delta_n", m.include_delta_n}};
  return doc;
}

inline void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write file");
  out << config_to_json(cfg).dump(2) << '\n';
}

}  // namespace epictrl
