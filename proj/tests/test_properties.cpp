#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epictrl/sweep.hpp"
#include "support.hpp"

using namespace epictrl;
using epictrl::testing::covid;
using epictrl::testing::outbreak_state;

TEST(Property, VectorFieldIsAffineInEachControl) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto m = epictrl::testing::random_params(rng, n, 1e4);
    const auto x = epictrl::testing::random_state(rng, n, 1e3);
    const double vmax = m.max_vaccination();
    const double v0 = vmax * unit(rng), u0 = unit(rng);
    const double a = unit(rng), b = unit(rng), c = 0.5 * (a + b);
    const auto fa = vector_field(x, v0, a, m), fb = vector_field(x, v0, b, m), fc = vector_field(x, v0, c, m);
    const auto ga = vector_field(x, a * vmax, u0, m), gb = vector_field(x, b * vmax, u0, m);
    const auto gc = vector_field(x, c * vmax, u0, m);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double fj = 0.5 * (fa.values()[j] + fb.values()[j]);
      const double gj = 0.5 * (ga.values()[j] + gb.values()[j]);
      EXPECT_NEAR(fc.values()[j], fj, 1e-9 * std::max(1.0, std::abs(fj)));
      EXPECT_NEAR(gc.values()[j], gj, 1e-9 * std::max(1.0, std::abs(gj)));
    }
  }
}

TEST(Property, RandomRunsStayNonNegativeAndConserve) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + trial % 3;
    auto x0 = epictrl::testing::random_state(rng, n, 2000.0);
    const double n0 = total_population(x0);
    const auto m = epictrl::testing::random_params(rng, n, n0);
    const auto grid = TimeGrid::make(35.0, 0.01);
    const auto c = ControlSignal::constant(grid.nodes(), unit(rng) * m.max_vaccination(), unit(rng));
    const auto traj = integrate_forward(x0, c, m, grid);
    const double start = n0 + x0.D();
    for (const auto& x : traj.values) {
      for (double v : x.values()) ASSERT_GE(v, -1e-9 * n0);
      ASSERT_NEAR((total_population(x) + x.D()) / start, 1.0, 1e-6);
    }
  }
}

TEST(Property, SweepControlsAreFeasible) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto x0 = epictrl::testing::random_state(rng, n, 2000.0);
    const auto m = epictrl::testing::random_params(rng, n, total_population(x0));
    auto w = default_weights(n);
    w.sigma0 = 5.0 + 50.0 * trial;
    const auto sol = fbsm_solve(x0, m, w, TimeGrid::make(5.0, 0.01));
    for (std::size_t i = 0; i < sol.controls.size(); ++i) {
      ASSERT_GE(sol.controls.u[i], 0.0);
      ASSERT_LE(sol.controls.u[i], 1.0);
      ASSERT_GE(sol.controls.v[i], 0.0);
      ASSERT_LE(sol.controls.v[i], m.max_vaccination());
    }
  }
}

TEST(Property, JointWeightScalingScalesCost) {
  const auto grid = TimeGrid::make(10.0, 0.01);
  const auto w = default_weights(2);
  auto scaled = w;
  const double c = 3.0;
  for (auto& o : scaled.omega) o *= c;
  scaled.sigma0 *= c;
  for (auto& s : scaled.sigma) s *= c;
  scaled.terminal.c *= c;
  const auto a = fbsm_solve(outbreak_state(), covid(), w, grid);
  const auto b = fbsm_solve(outbreak_state(), covid(), scaled, grid);
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_NEAR(b.cost / a.cost, c, 1e-6 * c);
  for (std::size_t i = 0; i < a.controls.size(); ++i) {
    EXPECT_NEAR(a.controls.u[i], b.controls.u[i], 1e-4);
    EXPECT_NEAR(a.controls.v[i], b.controls.v[i], 1e-4);
  }
}

TEST(Property, ImpulsesOnlyAddPopulation) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x0 = epictrl::testing::random_state(rng, 2, 2000.0);
    const auto m = epictrl::testing::random_params(rng, 2, total_population(x0));
    const auto grid = TimeGrid::make(20.0, 0.01);
    ImpulseSchedule s;
    for (double t = 2.0 + 3.0 * unit(rng); t < 19.0; t += 1.0 + 4.0 * unit(rng)) {
      s.events.push_back({std::round(t * 100.0) / 100.0, {unit(rng), unit(rng), unit(rng), unit(rng)}});
    }
    const auto traj = integrate_forward(x0, ControlSignal::constant(grid.nodes(), 0.2, 0.2), m, grid, s);
    double allowance = total_population(x0);
    for (std::size_t i = 0; i < traj.nodes(); ++i) {
      if (traj.jumps_at(i)) allowance += total_population(traj.after(i)) - total_population(traj.before(i));
      ASSERT_LE(total_population(traj.after(i)), allowance + 1e-6 * total_population(x0));
    }
  }
}
