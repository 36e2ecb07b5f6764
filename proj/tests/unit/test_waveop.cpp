#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/dispersive.hpp"
#include "scatlab/errors.hpp"
#include "scatlab/waveop.hpp"

using namespace scatlab;

namespace {
CookOptions quick() {
  CookOptions o;
  o.r_min = 40.0;
  o.intertwining_times = {0.5};
  return o;
}
}  // namespace

TEST(WaveOperator, ZeroPotentialIsIdentity) {
  const auto f = RadialDatum::gaussian(1.0);
  const auto w = cook_wave_operator(Potential::zero(), f, 5.0, quick());
  EXPECT_LT(relative_l2(w.output, w.input, w.grid, w.grid.r_max()), 1e-12);
  EXPECT_LT(w.isometry_defect, 1e-12);
}

TEST(WaveOperator, NearlyIsometricForWeakPotential) {
  const auto f = RadialDatum::gaussian(1.0);
  const auto w = cook_wave_operator(Potential::gaussian(0.3), f, 10.0, quick());
  EXPECT_LT(w.isometry_defect / w.input_norm, 0.02);
  EXPECT_GT(relative_l2(w.output, w.input, w.grid, w.grid.r_max()), 1e-4);
}

TEST(WaveOperator, DysonOrdersValidated) {
  const auto f = RadialDatum::gaussian(1.0);
  EXPECT_THROW(dyson_term(Potential::gaussian(0.3), f, 3, 5.0, quick()), InvalidArgument);
  EXPECT_THROW(dyson_term(Potential::gaussian(0.3), f, 0, 5.0, quick()), InvalidArgument);
}

TEST(WaveOperator, FirstDysonTermIsLinearInV) {
  const auto f = RadialDatum::gaussian(1.0);
  const auto a = dyson_term(Potential::gaussian(0.2), f, 1, 5.0, quick());
  const auto b = dyson_term(Potential::gaussian(0.4), f, 1, 5.0, quick());
  CplxVec half(b.term.size());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = 0.5 * b.term[i];
  EXPECT_LT(relative_l2(a.term, half, a.grid, a.grid.r_max()), 1e-10);
}

TEST(StructureFunction, GaussianMatchesDawsonClosedForm) {
  // \int_0^inf pi^{3/2} e^{-s^2/4} e^{irs/2} s ds, k = r/2:
  // pi^{3/2} (2 - 4 k D(k)) + i pi^{3/2} 2 sqrt(pi) k e^{-k^2}, D Dawson's integral.
  const auto L = structure_L(Potential::gaussian(1.0));
  const std::pair<double, cplx> frozen[] = {
      {-3.0, {-3.1711317591885715, -3.120745951821545}},
      {0.0, {11.136655993663416, 0.0}},
      {1.5, {2.3997360816666946, 8.435296611944166}},
      {4.0, {-2.2870410001006363, 0.7230724407400569}},
  };
  for (const auto& [r, v] : frozen) EXPECT_NEAR(std::abs(L(r) - v), 0.0, 1e-6) << "r=" << r;
  EXPECT_THROW(L(1e3), InvalidArgument);
}

TEST(StructureFunction, KappaScalesSamples) {
  const auto L = structure_L(Potential::gaussian(1.0));
  const auto K = L.with_kappa(structure_kappa_exact());
  EXPECT_NEAR(std::abs(K(1.5) - structure_kappa_exact() * L(1.5)), 0.0, 1e-14);
}

TEST(WaveOperator, LpNormOfGaussian) {
  RadialGrid g(20.0, 4000);
  CplxVec u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.node(i) * std::exp(-g.node(i) * g.node(i) / 2.0);
  EXPECT_NEAR(lp_norm_u(u, g, 2.0), std::pow(M_PI, 0.75), 1e-8);
  EXPECT_NEAR(lp_norm_u(u, g, INFINITY), 1.0, 1e-5);  // first node at h/2
}

TEST(WaveOperator, PacketFamilyIsSeeded) {
  const auto a = random_packet_family(4, 11), b = random_packet_family(4, 11), c = random_packet_family(4, 12);
  EXPECT_EQ(a[2].psi(1.3), b[2].psi(1.3));
  EXPECT_NE(a[2].psi(1.3), c[2].psi(1.3));
}
