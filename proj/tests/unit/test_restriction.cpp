#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/errors.hpp"
#include "scatlab/restriction.hpp"

using namespace scatlab;

TEST(Restriction, TomasExponent) {
  EXPECT_DOUBLE_EQ(tomas_exponent(3), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(tomas_exponent(2), 6.0 / 5.0);
}

TEST(Restriction, SphereMassAndTransform) {
  const auto s = sphere_measure(1.5, 48);
  EXPECT_NEAR(s.total_mass(), 4.0 * M_PI * 2.25, 1e-12);
  for (double xi : {0.3, 2.0, 7.5}) {
    const cplx v = sigma_hat(s, Vec3{0.0, 0.0, xi});
    EXPECT_NEAR(v.real(), sigma_hat_sphere_exact(1.5, xi), 1e-10);
    EXPECT_NEAR(v.imag(), 0.0, 1e-10);
  }
}

TEST(Restriction, TransformIsRotationInvariant) {
  const auto s = resolved_measure(3, 1.0, 10.0);
  const double a = 6.0 / std::sqrt(3.0);
  EXPECT_NEAR(std::abs(sigma_hat(s, Vec3{a, a, a}) - sigma_hat(s, Vec3{0.0, 0.0, 6.0})), 0.0, 1e-8);
}

TEST(Restriction, RefusesUnresolvedFrequency) {
  const auto s = sphere_measure(1.0, 8);
  EXPECT_THROW(sigma_hat(s, Vec3{0.0, 0.0, 200.0}), NumericError);
}

TEST(Restriction, CircleMass) {
  EXPECT_NEAR(circle_measure(2.0, 256).total_mass(), 4.0 * M_PI, 1e-12);
}

TEST(Restriction, DecayExponents) {
  EXPECT_NEAR(sigma_hat_decay(3).fit.exponent, 1.0, 0.05);
  EXPECT_NEAR(sigma_hat_decay(2).fit.exponent, 0.5, 0.05);
}

TEST(Restriction, SmoothStepAndDyadicPartition) {
  EXPECT_DOUBLE_EQ(smooth_step(-2.0), 1.0);
  EXPECT_DOUBLE_EQ(smooth_step(2.0), 0.0);
  EXPECT_NEAR(smooth_step(0.0), 0.5, 1e-12);
  for (double r : {0.7, 1.0, 3.3, 17.0}) {
    double s = 0.0;
    for (int j = -8; j <= 12; ++j) s += dyadic_bump(r / std::ldexp(1.0, j));
    EXPECT_NEAR(s, 1.0, 1e-12) << "r=" << r;
  }
  EXPECT_EQ(dyadic_bump(0.4), 0.0);
  EXPECT_EQ(dyadic_bump(2.1), 0.0);
}

TEST(Restriction, ImpliedCriticalIndex) {
  // kernel pieces decay like 2^{-j} in 1 -> inf and grow like 2^j in 2 -> 2
  EXPECT_NEAR(implied_critical_index(-1.0, 1.0), 4.0 / 3.0, 1e-12);
  EXPECT_THROW(implied_critical_index(1.0, 1.0), NumericError);
}

TEST(Strichartz, GaussianIsTheExtremiserValue) {
  EXPECT_NEAR(strichartz_gaussian_constant(), std::pow(12.0, -1.0 / 12.0), 1e-15);
  const Packet1D g{0.0, 1.0, 0.0, 1.0, 0.0};
  const auto v = strichartz_value(std::span<const Packet1D>(&g, 1));
  EXPECT_NEAR(v.ratio, strichartz_gaussian_constant(), 1e-4);
}

TEST(Strichartz, ScaleAndTranslationInvariant) {
  const Packet1D p[] = {{-2.0, 0.8, 1.0, 1.0, 0.0}, {2.5, 1.2, -0.5, 0.6, 0.3}};
  const double a = strichartz_value(p).ratio;
  EXPECT_NEAR(strichartz_value(p, 2.0).ratio, a, 1e-4 * a);
  const Packet1D q[] = {{1.0, 0.8, 0.0, 1.0, 0.0}};
  const Packet1D q0[] = {{0.0, 0.8, 0.0, 1.0, 0.0}};
  EXPECT_NEAR(strichartz_value(q).ratio, strichartz_value(q0).ratio, 1e-6);
  EXPECT_LE(a, strichartz_gaussian_constant() + 1e-4);
}
