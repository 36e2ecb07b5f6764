#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/errors.hpp"
#include "scatlab/freefield.hpp"

using namespace scatlab;

namespace {
// e^{it Delta} e^{-r^2/2} in R^3
cplx gaussian_exact(double r, double t) {
  const cplx a(1.0, 2.0 * t);
  return std::pow(a, -1.5) * std::exp(-r * r / (2.0 * a));
}
}  // namespace

TEST(FreePropagator, GaussianMatchesClosedForm) {
  RadialGrid g(80.0, 4096);
  auto f = WavePacket::radial(g, [](double r) { return cplx(std::exp(-r * r / 2.0)); });
  FreePropagator prop(g);
  for (double t : {0.5, 2.0, 6.0}) {
    const auto ev = prop.propagate(f, t);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::max(err, std::abs(ev.packet[i] - gaussian_exact(g.node(i), t)));
    EXPECT_LT(err, 1e-8) << "t=" << t;
    EXPECT_FALSE(ev.reflection_flag);
  }
}

TEST(FreePropagator, LinfDecaysAtThreeHalves) {
  RadialGrid g(80.0, 4096);
  auto f = WavePacket::radial(g, [](double r) { return cplx(std::exp(-r * r / 2.0)); });
  const auto a = free_propagate(f, 4.0), b = free_propagate(f, 8.0);
  EXPECT_NEAR(std::log(a.packet.linf() / b.packet.linf()) / std::log(2.0), 1.5, 0.05);
}

TEST(FreePropagator, PreservesL2AndIsReversible) {
  RadialGrid g(40.0, 1024);
  auto f = WavePacket::radial(g, [](double r) { return cplx(std::exp(-r * r) * (1.0 + r), std::sin(r) * std::exp(-r)); });
  FreePropagator prop(g);
  auto c = prop.analyse(f);
  prop.advance(c, 1.3);
  const auto mid = prop.synthesise(c);
  EXPECT_NEAR(mid.l2(), f.l2(), 1e-12);
  prop.advance(c, -1.3);
  const auto back = prop.synthesise(c);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(back[i] - f[i]), 0.0, 1e-12);
}

TEST(FreePropagator, FlagsReflection) {
  RadialGrid g(10.0, 256);
  auto f = WavePacket::radial(g, [](double r) { return cplx(std::exp(-r * r / 2.0)); });
  EXPECT_TRUE(free_propagate(f, 20.0).reflection_flag);
}

TEST(Resolvent, GreenFunctionSymmetric) {
  const cplx k = resolvent_wavenumber(1.3, Branch::Plus, 0.0);
  EXPECT_NEAR(std::abs(radial_green(0.7, 2.1, k) - radial_green(2.1, 0.7, k)), 0.0, 1e-15);
  EXPECT_GE(resolvent_wavenumber(1.3, Branch::Minus, 1e-3).imag(), 0.0);
  EXPECT_NEAR(std::abs(radial_green(0.7, 2.1, 0.0) - 0.7), 0.0, 1e-15);
}

TEST(Resolvent, DenseAndFastAgree) {
  RadialGrid g(12.0, 200);
  const auto K = free_resolvent_kernel(g, 1.1, Branch::Plus, 0.0);
  Eigen::VectorXcd u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.node(i) * std::exp(-g.node(i) * g.node(i));
  const Eigen::VectorXcd dense = K.entries * u;
  const auto fast = apply_free_resolvent(g, std::span<const cplx>(u.data(), u.size()), K.k);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(dense[i] - fast[i]), 0.0, 1e-12);
}

TEST(Resolvent, SolvesRadialEquation) {
  // -w'' - k^2 w = u in the interior, checked by second differences
  RadialGrid g(12.0, 2400);
  const cplx k = resolvent_wavenumber(1.1, Branch::Plus, 0.0);
  CplxVec u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.node(i) * std::exp(-g.node(i) * g.node(i));
  const auto w = apply_free_resolvent(g, u, k);
  const double h = g.spacing();
  double err = 0.0;
  for (std::size_t i = 10; i + 10 < g.size(); ++i) {
    const cplx lhs = -(w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h) - k * k * w[i];
    err = std::max(err, std::abs(lhs - u[i]));
  }
  EXPECT_LT(err, 1e-4);
}

TEST(Resolvent, ImaginaryPartIdentityWithExactConstant) {
  RadialGrid g(30.0, 3000);
  const auto chk = imaginary_part_identity_check(1.5, [](double r) { return std::exp(-r * r); }, g,
                                                 imaginary_part_constant_exact());
  EXPECT_LT(chk.residual, 1e-3);
  EXPECT_NEAR(std::abs(chk.fitted_constant - imaginary_part_constant_exact()), 0.0,
              1e-3 * std::abs(imaginary_part_constant_exact()));
}

TEST(Resolvent, KrsFitOnSyntheticRatios) {
  RealVec l = logspace(1.0, 30.0, 12), r(12);
  for (std::size_t i = 0; i < l.size(); ++i) r[i] = 0.8 * std::pow(l[i], -2.0 / 3.0);
  EXPECT_NEAR(fit_decay_ratios(l, r).exponent, 2.0 / 3.0, 1e-10);
}
