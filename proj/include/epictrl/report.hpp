#pragma once

// CSV time series and run summaries. Numbers are written with 12 significant
// digits so identical runs give byte-identical files.

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epictrl/controls.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/model.hpp"
#include "epictrl/trajectory.hpp"

namespace epictrl {

inline std::string format_number(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x == 0.0 ? 0.0 : x);
  return buffer;
}

/// Parse back a number written by format_number.
inline double round_trip(double x) { return std::stod(format_number(x)); }

inline std::string trajectory_header(std::size_t doses) {
  std::string header = "t,S,E,A,I,R,D";
  for (std::size_t i = 1; i <= doses; ++i) header += ",V" + std::to_string(i);
  return header + ",u,v";
}

/// One row per sample; impulse nodes appear twice with equal t.
inline void write_trajectory_rows(std::ostream& out, const Trajectory& traj, const ControlSignal& controls,
                                  const std::string& prefix = {}) {
  for (std::size_t node = 0; node < traj.nodes(); ++node) {
    const std::size_t end = node + 1 < traj.nodes() ? traj.node_begin[node + 1] : traj.values.size();
    for (std::size_t k = traj.node_begin[node]; k < end; ++k) {
      out << prefix << format_number(traj.times[k]);
      for (double x : traj.values[k].values()) out << ',' << format_number(x);
      out << ',' << format_number(controls.u[node]) << ',' << format_number(controls.v[node]) << '\n';
    }
  }
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 const ControlSignal& controls) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << trajectory_header(traj.back().doses()) << '\n';
  write_trajectory_rows(out, traj, controls);
}

inline void write_controls_csv(const std::filesystem::path& path, const ControlSignal& controls) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,u,v\n";
  for (std::size_t i = 0; i < controls.size(); ++i) {
    out << format_number(controls.grid[i]) << ',' << format_number(controls.u[i]) << ','
        << format_number(controls.v[i]) << '\n';
  }
}

inline void write_adjoints_csv(const std::filesystem::path& path, const AdjointTrajectory& adjoint) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,p1,p2,p3,p4,p5,p6";
  for (std::size_t i = 1; i <= adjoint.back().doses(); ++i) out << ",q" << i;
  out << '\n';
  for (std::size_t k = 0; k < adjoint.values.size(); ++k) {
    out << format_number(adjoint.times[k]);
    for (double x : adjoint.values[k].values()) out << ',' << format_number(x);
    out << '\n';
  }
}

/// Read a `t,u,v` control file (as written by write_controls_csv).
inline ControlSignal read_controls_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::string line;
  std::getline(in, line);
  if (line != "t,u,v") throw ParseError(path.string() + ":1: expected header t,u,v");
  ControlSignal out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string t, u, v;
    if (!std::getline(fields, t, ',') || !std::getline(fields, u, ',') || !std::getline(fields, v, ',')) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": expected three columns");
    }
    try {
      out.grid.push_back(std::stod(t));
      out.u.push_back(std::stod(u));
      out.v.push_back(std::stod(v));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": not a number");
    }
  }
  return out;
}

/// Headline numbers of one run.
struct RunSummary {
  double final_N = 0.0;
  double final_D = 0.0;
  double peak_I = 0.0;
  double peak_A = 0.0;
  std::optional<double> day_S_below_1pct;
  std::optional<double> day_E_below_1pct;
  std::optional<double> day_I_below_1pct;
  double final_Vn = 0.0;
  double final_R = 0.0;
  double J = 0.0;
  std::optional<std::size_t> iterations;
  std::optional<bool> converged;
  std::optional<double> transversality_residual;
};

/// Summary of a trajectory, computed from the values as they are written to
/// CSV so it can be reproduced from the file alone.
inline RunSummary summarize(const Trajectory& traj, double cost) {
  RunSummary s;
  const auto& first = traj.values.front();
  const auto& last = traj.back();
  const auto crossing = [&](Compartment c) -> std::optional<double> {
    const double threshold = 0.01 * round_trip(first[c]);
    for (std::size_t k = 0; k < traj.values.size(); ++k) {
      if (round_trip(traj.values[k][c]) < threshold) return round_trip(traj.times[k]);
    }
    return std::nullopt;
  };
  for (const auto& x : traj.values) {
    s.peak_I = std::max(s.peak_I, round_trip(x.I()));
    s.peak_A = std::max(s.peak_A, round_trip(x.A()));
  }
  double n = 0.0;
  for (std::size_t j = 0; j < last.size(); ++j) {
    if (j != static_cast<std::size_t>(Compartment::D)) n += round_trip(last.values()[j]);
  }
  s.final_N = n;
  s.final_D = round_trip(last.D());
  s.final_R = round_trip(last.R());
  s.final_Vn = round_trip(last.dose(last.doses() - 1));
  s.day_S_below_1pct = crossing(Compartment::S);
  s.day_E_below_1pct = crossing(Compartment::E);
  s.day_I_below_1pct = crossing(Compartment::I);
  s.J = cost;
  return s;
}

inline nlohmann::json summary_to_json(const RunSummary& s) {
  using nlohmann::json;
  const auto opt = [](const auto& value) -> json {
    if (value) return json(*value);
    return json(nullptr);
  };
  return json{{"final_N", s.final_N},
              {"final_D", s.final_D},
              {"peak_I", s.peak_I},
              {"peak_A", s.peak_A},
              {"day_S_below_1pct", opt(s.day_S_below_1pct)},
              {"day_E_below_1pct", opt(s.day_E_below_1pct)},
              {"day_I_below_1pct", opt(s.day_I_below_1pct)},
              {"final_Vn", s.final_Vn},
              {"final_R", s.final_R},
              {"J", s.J},
              {"iterations", opt(s.iterations)},
              {"converged", opt(s.converged)},
              {"transversality_residual", opt(s.transversality_residual)}};
}

inline void write_summary_json(const std::filesystem::path& path, const RunSummary& s) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << summary_to_json(s).dump(2) << '\n';
}

}  // namespace epictrl
