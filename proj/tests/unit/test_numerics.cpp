#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scatlab/errors.hpp"
#include "scatlab/numerics.hpp"
#include "scatlab/transforms.hpp"

using namespace scatlab;

TEST(RadialGrid, MidpointNodes) {
  RadialGrid g(2.0, 8);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_DOUBLE_EQ(g.node(0), 0.125);
  EXPECT_DOUBLE_EQ(g.node(7), 1.875);
  EXPECT_EQ(g.refined().size(), 16u);
}

TEST(LineGrid, ZeroIndexIsOrigin) {
  LineGrid g(4.0, 64);
  EXPECT_NEAR(g.node(g.zero_index()), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.125);
}

TEST(Gauss, IntegratesPolynomialsExactly) {
  const auto& rule = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * std::pow(rule.x[i], 14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-14);
}

TEST(Integrate, SmoothFunction) {
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, 0.0, 8.0, 16),
              std::sqrt(M_PI) / 2.0, 1e-13);
}

TEST(IntegrateLinearExp, MatchesQuadratureIncludingSmallRate) {
  for (cplx c : {cplx(0.0, 3.0), cplx(-0.5, 1.0), cplx(1e-9, 0.0)}) {
    const cplx a(0.3, -0.1), b(1.2, 0.4);
    const cplx exact = integrate_linear_exp(a, b, c, 0.5, 2.0);
    const double re = integrate([&](double s) { return ((a + b * s) * std::exp(c * s)).real(); }, 0.5, 2.0, 32);
    const double im = integrate([&](double s) { return ((a + b * s) * std::exp(c * s)).imag(); }, 0.5, 2.0, 32);
    EXPECT_NEAR(std::abs(exact - cplx(re, im)), 0.0, 1e-12);
  }
}

TEST(Interp, CubicIsExactOnQuadratics) {
  RealVec y(20);
  for (int k = 0; k < 20; ++k) y[k] = 1.0 + 0.5 * k * 0.1 - (k * 0.1) * (k * 0.1);
  const double x = 0.734;
  EXPECT_NEAR(interp_uniform(y, 0.0, 0.1, x), 1.0 + 0.5 * x - x * x, 1e-12);
}

TEST(PowerLaw, RecoversExponent) {
  RealVec t = logspace(1.0, 100.0, 40), v(40);
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = 3.0 * std::pow(t[i], -1.5);
  const auto fit = fit_power_law(t, v, 1.0, 100.0);
  EXPECT_NEAR(fit.exponent, 1.5, 1e-10);
  EXPECT_NEAR(fit.prefactor, 3.0, 1e-9);
  EXPECT_LT(fit.residual, 1e-10);
}

TEST(PowerLaw, TooFewSamplesThrows) {
  RealVec t{1, 2, 3}, v{1, 1, 1};
  EXPECT_ANY_THROW(fit_power_law(t, v, 0.5, 4.0));
}

TEST(Oscillatory, GaussianCosineTransform) {
  // \int_0^inf e^{-s^2} cos(2 s) ds = sqrt(pi)/2 e^{-1}
  const auto r = oscillatory_integral([](double s) { return std::exp(-s * s); }, 2.0, 0.0);
  EXPECT_NEAR(r.value.real(), std::sqrt(M_PI) / 2.0 * std::exp(-1.0), 1e-12);
}

TEST(Oscillatory, RefusesSlowDecay) {
  EXPECT_ANY_THROW(oscillatory_integral([](double s) { return 1.0 / (1.0 + s); }, 1.0, 0.0));
}

TEST(SineTransform, RoundTrip) {
  RadialGrid g(10.0, 128);
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  RealVec u(g.size()), c(g.size()), back(g.size());
  for (auto& x : u) x = n(rng);
  SineTransform st(g);
  st.forward(u, c);
  st.inverse(c, back);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(back[i], u[i], 1e-12);
}

TEST(SineTransform, Parseval) {
  RadialGrid g(10.0, 256);
  RealVec u = g.sample([](double r) { return r * std::exp(-r * r); }), c(g.size());
  SineTransform(g).forward(u, c);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    a += u[i] * u[i] * g.spacing();
    b += c[i] * c[i];
  }
  EXPECT_NEAR(a, b, 1e-10 * a);
}

TEST(LineFFT, RoundTrip) {
  LineFFT f(64);
  CplxVec d(64), orig;
  for (int k = 0; k < 64; ++k) d[k] = cplx(std::sin(k), std::cos(3 * k));
  orig = d;
  f.forward(d);
  f.backward(d);
  for (int k = 0; k < 64; ++k) EXPECT_NEAR(std::abs(d[k] / 64.0 - orig[k]), 0.0, 1e-13);
}
