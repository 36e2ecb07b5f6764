#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/birman.hpp"
#include "scatlab/propagator.hpp"

using namespace scatlab;

namespace {
CplxVec gaussian_u(const RadialGrid& g) {
  CplxVec u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.node(i) * std::exp(-g.node(i) * g.node(i) / 2.0);
  return u;
}
double mass(const CplxVec& u, double h) {
  double s = 0.0;
  for (auto z : u) s += std::norm(z) * h;
  return s;
}
}  // namespace

TEST(SplitStep, ZeroPotentialIsExactFreeFlow) {
  RadialGrid g(60.0, 2048);
  SplitStepPropagator p(Potential::zero(), g, 0.05);
  auto u = gaussian_u(g);
  p.evolve(u, 3.0);
  const cplx a(1.0, 6.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    err = std::max(err, std::abs(u[i] - r * std::pow(a, -1.5) * std::exp(-r * r / (2.0 * a))));
  }
  EXPECT_LT(err, 1e-9);
}

TEST(SplitStep, UnitaryAndReversible) {
  RadialGrid g(40.0, 1024);
  const auto V = Potential::gaussian(-2.0);
  SplitStepPropagator p(V, g, default_time_step(V));
  auto u = gaussian_u(g);
  const auto u0 = u;
  p.evolve(u, 1.0);
  EXPECT_NEAR(mass(u, g.spacing()), mass(u0, g.spacing()), 1e-11);
  p.evolve(u, -1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(u[i] - u0[i]));
  EXPECT_LT(err, 1e-10);
}

TEST(SplitStep, SecondOrderInTimeStep) {
  RadialGrid g(30.0, 512);
  const auto V = Potential::gaussian(1.5);
  auto run = [&](double dt) {
    SplitStepPropagator p(V, g, dt);
    auto u = gaussian_u(g);
    p.evolve(u, 1.0);
    return u;
  };
  const auto ref = run(0.0025), a = run(0.02), b = run(0.01);
  double ea = 0.0, eb = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    ea = std::max(ea, std::abs(a[i] - ref[i]));
    eb = std::max(eb, std::abs(b[i] - ref[i]));
  }
  EXPECT_NEAR(std::log2(ea / eb), 2.0, 0.2);
}

TEST(SplitStep, FftFriendlySizes) {
  EXPECT_EQ(fft_friendly(1000), 1000u);
  EXPECT_EQ(fft_friendly(1001), 1024u);
  EXPECT_EQ(fft_friendly(7), 8u);
}

TEST(BoundStates, MatchSturmCountAndAreOrthonormal) {
  RadialGrid g(30.0, 1200);
  const auto V = Potential::gaussian(-6.0);
  const auto b = bound_states(V, g, -1e-6, 30.0);
  ASSERT_GE(b.energies.size(), 1u);
  EXPECT_EQ(static_cast<int>(b.energies.size()), count_eigenvalues_below(V, g, -1e-6));
  CplxVec u(g.size());
  for (std::size_t i = 0; i < b.vectors[0].size(); ++i) u[i] = b.vectors[0][i];
  project_out(u, b, g.spacing());
  EXPECT_LT(mass(u, g.spacing()), 1e-20);
}

TEST(BoundStates, RepulsivePotentialHasNone) {
  RadialGrid g(30.0, 600);
  EXPECT_TRUE(bound_states(Potential::gaussian(2.0), g).energies.empty());
  EXPECT_EQ(count_eigenvalues_below(Potential::gaussian(2.0), g), 0);
}
